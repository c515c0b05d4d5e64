#pragma once

#include "klab/basis.hpp"
#include "klab/deadend.hpp"
#include "klab/koethe.hpp"
#include "klab/operator.hpp"

namespace klab {

/// Apparatus for one (grade r, truncation N') pair:
///   A = J_r |T'| J_r' Q^(N'),  J_r = diag(a_{r+1}/a_r),  J_r' = diag(a_1/a_{r+2}),
///   B = I - A with Neumann-checked inverse, and the cone
///   Q = { x >= 0 : x >= A x }.
struct ConeContext {
    std::size_t r = 0;
    std::size_t n_trunc = 0; // N'
    Mat a_op;                // the contraction A (entrywise nonnegative)
    Mat b_inv;               // (I - A)^{-1}
    double nu = 0.0;         // exact G_r operator norm of A
    double b_inv_norm = 0.0; // G_r operator norm of B^{-1}
    double neumann_gap = 0.0; // ||B^{-1} - partial Neumann sum||_{G_r}
    Vec jr;                  // diagonal of J_r
    Vec jr_prime;            // diagonal of J_r'
    const KoetheMatrix* m = nullptr;

    Vec apply_a(const Vec& x) const { return matvec(a_op, x); }
    Vec apply_b_inv(const Vec& x) const { return matvec(b_inv, x); }

    /// J_r' Q^(N') x.
    Vec apply_jr_prime_trunc(const Vec& x) const {
        Vec y(x.size(), 0.0);
        for (std::size_t n = 0; n < n_trunc; ++n) y[n] = jr_prime[n] * x[n];
        return y;
    }
};

/// Exact G_r sup-norm operator norm of a nonnegative matrix:
/// max_i a_{r,i} sum_j |A_{ij}|/a_{r,j}.
double weighted_row_norm(const Mat& a, const KoetheMatrix& m, std::size_t r);

/// Same norm in the a_inf weights (the bound C(N') of the totality argument).
double weighted_row_norm_inf(const Mat& a, const DeadEndData& dd);

/// Requires the rescaled operator; throws ConditionViolationError if the
/// computed nu exceeds 1/2.
ConeContext build_context(const KoetheMatrix& m, const DeadEndData& dd, const OperatorMatrix& t,
                          std::size_t r, std::size_t n_trunc);

/// x >= 0 and x >= A x componentwise, with additive slack tau_cone * |x|_r.
bool cone_member(const ConeContext& ctx, const Vec& x, double tau_cone);

struct Decomposition {
    Vec y; // B^{-1}(Bx)_+
    Vec z; // B^{-1}(Bx)_-
};

/// x = y - z with y, z in the cone and |y|_r, |z|_r <= 4 |x|_r.
Decomposition decompose(const ConeContext& ctx, const Vec& x);

/// S_{n,r}^(N') x = T_n(J_r' Q^(N') x).
Vec apply_s(const ConeContext& ctx, const OperatorMatrix& t, const BasisExpansion& e,
            std::size_t n, const Vec& x);

struct EndpointReport {
    double worst_g1_ratio = 0.0;  // |Sx|_1 / |x|_1 over x >= 0
    double worst_ginf_ratio = 0.0; // |Sx|_inf / |x|_inf over cone samples
    bool pass = false;
};

EndpointReport endpoint_inequalities(const ConeContext& ctx, const OperatorMatrix& t,
                                     const BasisExpansion& e, const DeadEndData& dd,
                                     std::size_t n, Rng& rng, std::size_t samples);

/// Empirical interpolation constant: max over truncation levels n, cone samples
/// B^{-1}w (w >= 0) and extreme directions B^{-1}e_i of |S_{n,r}^(N')x|_r/|x|_r.
double estimate_interpolation_constant(const ConeContext& ctx, const OperatorMatrix& t,
                                       const BasisExpansion& e, Rng& rng, std::size_t samples);

struct EquicontinuityReport {
    double worst_ratio = 0.0; // max |T_n x|_r / (8 C |x|_{r+3})
    double bound_used = 0.0;  // 8 C(r)
    bool pass = false;
};

/// |T_n x|_r <= 8 C(r) |x|_{r+3} over all n <= d and random probes.
EquicontinuityReport equicontinuity_check(const KoetheMatrix& m, const BasisExpansion& e,
                                          const OperatorMatrix& t, std::size_t r, double c_hat,
                                          Rng& rng, std::size_t samples);

struct HypothesisReport {
    bool semilattice = true;       // min of cone members stays in the cone
    bool total = true;             // decompose splits every x into cone members
    double g_inf_norm = 0.0;       // C(N'): norm of A on G_inf
    bool strictly_positive = true; // B^{-1}x0 >= x0 for strictly positive x0
    bool pass = false;
};

HypothesisReport hypothesis_checks(const ConeContext& ctx, const DeadEndData& dd, Rng& rng,
                                   std::size_t samples);

} // namespace klab
