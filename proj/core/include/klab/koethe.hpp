#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "klab/linalg.hpp"

namespace klab {

/// Truncated grid of positive weights a_{k,n}, k = 1..K grades, n = 1..N
/// coordinates. The `normalized` flag is set only by verify_conditions.
///
/// Normalization conditions:
///   1. a_{1,n} = 1 for all n
///   2. a_{k,n}^2 <= a_{k+1,n}
///   3. sum_n a_{k,n}/a_{k+1,n} <= 1
///   4. a_{k,n+1}/a_{k+1,n+1} <= a_{k,n}/a_{k+1,n}  (regular ratio columns)
class KoetheMatrix {
public:
    KoetheMatrix(std::size_t K, std::size_t N, Vec grid);

    std::size_t grades() const { return K_; }
    std::size_t dim() const { return N_; }
    bool normalized() const { return normalized_; }
    void set_normalized(bool v) { normalized_ = v; }

    /// Weight a_{k,n}, 1-based indices.
    double at(std::size_t k, std::size_t n) const { return a_[(k - 1) * N_ + (n - 1)]; }

    const Vec& grid() const { return a_; }

private:
    std::size_t K_;
    std::size_t N_;
    Vec a_; // row-major, grade-major
    bool normalized_ = false;
};

struct ConditionCheck {
    bool pass = true;
    bool applicable = true;   // false when the condition is vacuous (e.g. K = 1)
    double margin = 0.0;      // slack of the worst instance; negative = violated
    std::size_t worst_k = 0;  // 1-based witness indices, 0 if none
    std::size_t worst_n = 0;
};

struct ConditionReport {
    std::array<ConditionCheck, 4> condition; // conditions 1..4
    bool all_pass = false;
    double max_entry = 0.0;
};

/// Exact-comparison check of conditions 1-4 (no tolerance). Sets the matrix's
/// normalized flag iff every condition passes. Rejects matrices with
/// nonpositive/nonfinite entries or entries whose square overflows, since all
/// Hilbert-norm evaluations square the weights.
ConditionReport verify_conditions(KoetheMatrix& m);

struct NormalizeLog {
    Vec row_divisor;                   // the first raw row (diagonal isomorphism)
    std::vector<std::size_t> selected; // 1-based raw row indices kept
    Vec scalars;                       // scaling factor c per selected row
};

struct NormalizeResult {
    KoetheMatrix matrix;
    NormalizeLog log;
};

/// Best-effort reduction of a grade-monotone, regular raw grid to a grid
/// satisfying conditions 1-4: divide by row one, then walk the remaining rows
/// in order, scaling each by the minimal c = max(1, max_n u_n^2/v_n,
/// sum_n u_n/v_n) against the previously emitted row u.
NormalizeResult normalize(const KoetheMatrix& raw);

/// |x|_k = sup_n |x_n| a_{k,n}
double sup_norm(const KoetheMatrix& m, const Vec& x, std::size_t k);

/// ||x||_k = (sum_n |x_n|^2 a_{k,n}^2)^{1/2}
double hilbert_norm(const KoetheMatrix& m, const Vec& x, std::size_t k);

/// <x,y>_k = sum_n a_{k,n}^2 x_n y_n
double grade_inner(const KoetheMatrix& m, const Vec& x, const Vec& y, std::size_t k);

} // namespace klab
