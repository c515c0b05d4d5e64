#pragma once

#include "klab/koethe.hpp"
#include "klab/linalg.hpp"

namespace klab {

/// N x N matrix of the operator T acting on the truncated space. After
/// rescale_to_contraction the entries satisfy the contraction condition
/// ||T|x||_k <= 1/2 |x|_{k+1} for every grade k < K.
class OperatorMatrix {
public:
    OperatorMatrix(std::size_t N, Vec entries);

    std::size_t dim() const { return N_; }
    Vec apply(const Vec& x) const;
    double at(std::size_t i, std::size_t j) const { return t_[(i - 1) * N_ + (j - 1)]; }
    const Vec& entries() const { return t_; }
    double scale_applied() const { return scale_; }
    void set_scale(double s) { scale_ = s; }

private:
    std::size_t N_;
    Vec t_;
    double scale_ = 1.0;
};

/// |T|: entrywise absolute value.
OperatorMatrix modulus(const OperatorMatrix& t);

/// Exact value of sup{ |||T|x||_k : |x|_{k+1} <= 1 }. For nonnegative matrices
/// the supremum over the sup-norm ball is attained at x_j = 1/a_{k+1,j}, which
/// gives the closed form ( sum_i a_{k,i}^2 ( sum_j |t_{i,j}|/a_{k+1,j} )^2 )^{1/2}.
double grade_norm(const OperatorMatrix& t, const KoetheMatrix& m, std::size_t k);

struct RescaleResult {
    OperatorMatrix op;
    double scale;
};

/// Enforce the contraction condition by one global scalar
/// c = min(1, 1/(2 max_k grade_norm)); scaling preserves range(T).
RescaleResult rescale_to_contraction(const OperatorMatrix& t, const KoetheMatrix& m);

/// Diagnostic: sup_i sum_j |t_{i,j}| (c0 operator criterion, always finite at
/// truncation).
double row_sum_sup(const OperatorMatrix& t);

} // namespace klab
