#pragma once

#include "klab/deadend.hpp"
#include "klab/koethe.hpp"
#include "klab/operator.hpp"

namespace klab {

/// H_1-orthonormal basis of range(T) at truncation.
struct RangeSubspace {
    Mat span;      // N x d, columns orthonormal w.r.t. <.,.>_1
    std::size_t d; // numerical rank at tau_rank
};

/// Column-pivoted modified Gram-Schmidt in the <.,.>_1 inner product; rank cut
/// at tau_rank times the largest pivot.
RangeSubspace range_basis(const OperatorMatrix& t, const KoetheMatrix& m, double tau_rank);

/// The Schmidt system of the embedding (range, ||.||_inf) -> (range, ||.||_1):
/// H_1-orthonormal, H_inf-orthogonal, weights lambda_j = ||f_j||_inf^2 sorted
/// descending.
struct BasisExpansion {
    Mat f;      // N x d, column j is f_j
    Vec lambda; // descending
    std::size_t d = 0;
    double orth_residual = 0.0; // worst Gram residual observed at build time

    Vec vector(std::size_t j) const { // 1-based
        Vec v(f.rows());
        for (std::size_t i = 0; i < f.rows(); ++i) v[i] = f(i, j - 1);
        return v;
    }
};

/// Simultaneous diagonalization of the H_1 and H_inf Gram forms on the span:
/// Cholesky-reduce the definite pair, Jacobi-diagonalize, map back.
BasisExpansion extract_basis(const RangeSubspace& sub, const KoetheMatrix& m,
                             const DeadEndData& dd, double tau_rank);

/// Coefficients <x, f_j>_1.
Vec expand(const KoetheMatrix& m, const BasisExpansion& e, const Vec& x);
Vec reconstruct(const BasisExpansion& e, const Vec& coefficients);

/// Relative H_1 distance of x from span(f_1..f_d); > tau_rank means x is
/// outside range(T) and reconstruction is lossy.
double range_residual(const KoetheMatrix& m, const BasisExpansion& e, const Vec& x);

/// T_n x = sum_{j<=n} <Tx, f_j>_1 f_j. n = 0 yields the zero operator; n = d
/// reproduces T exactly on the truncated space.
Vec apply_projected(const KoetheMatrix& m, const OperatorMatrix& t, const BasisExpansion& e,
                    std::size_t n, const Vec& x);

struct ContractionReport {
    double worst_h1_ratio = 0.0;  // max ||T_n x||_1 / ||Tx||_1
    double worst_inf_ratio = 0.0; // max ||T_n x||_inf / ||Tx||_inf
    double final_error = 0.0;     // max over probes of ||T_d x - Tx||_inf
    bool monotone = true;         // n -> ||T_n x - Tx||_inf nonincreasing
    bool pass = false;
};

ContractionReport verify_contractions(const KoetheMatrix& m, const OperatorMatrix& t,
                                      const DeadEndData& dd, const BasisExpansion& e, Rng& rng,
                                      std::size_t samples);

} // namespace klab
