#pragma once

#include <string>
#include <vector>

#include "klab/koethe.hpp"
#include "klab/operator.hpp"

namespace klab {

/// Weights and constants of the three dead-end Banach spaces
///   H_inf = l2(a_inf),  G_inf = c0(a_inf),  G_inf0 = c0(b_inf).
/// b_{inf,n} = a_{n,n} for n <= K, extended by a_{K,n} beyond the grade budget.
/// delta_k = 1/(2^k D_{k+2}) for k = 1..K_inf with K_inf = K - 2.
struct DeadEndData {
    Vec D;       // D_1..D_K, nondecreasing; ||x||_k <= D_k |x|_{inf,0}
    Vec delta;   // delta_1..delta_{K_inf}
    Vec a_inf;   // a_{inf,n}^2 = sum_k delta_k^2 a_{k,n}^2
    Vec b_inf;   // b_{inf,n}
    Vec M;       // M_r, M_r^2 = D_{r+2}^2 + 1, r = 1..K-2
    std::size_t K_inf = 0;

    double Dk(std::size_t k) const { return D[k - 1]; }
    double delta_k(std::size_t k) const { return delta[k - 1]; }
};

Vec dominating_weight(const KoetheMatrix& m); // b_inf

/// D_k = running max over k of ( sum_n (a_{k,n}/b_{inf,n})^2 )^{1/2}.
Vec compute_D(const KoetheMatrix& m);

/// Requires K >= 3 so that K_inf = K - 2 >= 1.
DeadEndData build_deadend(const KoetheMatrix& m);

/// ||x||_inf, evaluated over the a_inf weights.
double inf_hilbert(const DeadEndData& dd, const Vec& x);
/// ||x||_inf evaluated as the grade sum sum_k delta_k^2 ||x||_k^2 (same value,
/// different summation order; used as a cross-check).
double inf_hilbert_gradewise(const KoetheMatrix& m, const DeadEndData& dd, const Vec& x);
/// |x|_inf = sup_n |x_n| a_{inf,n}
double inf_sup(const DeadEndData& dd, const Vec& x);
/// |x|_{inf,0} = sup_n |x_n| b_{inf,n}
double inf_zero(const DeadEndData& dd, const Vec& x);
/// <x,y> with a_inf^2 weights.
double inf_inner(const DeadEndData& dd, const Vec& x, const Vec& y);

struct IneqCheck {
    std::string name;
    double worst_ratio = 0.0; // max of lhs/rhs over all probes (0/0 counts as 0)
    std::size_t witness = 0;  // probe index of the worst ratio
    double bound = 1.0;       // the ratio must stay <= bound
    bool pass = true;
};

struct IneqReport {
    std::vector<IneqCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// ||T'x||_inf <= |x|_{inf,0} at the extreme point x_n = 1/b_{inf,n} and on
/// random probes; also the exact constant chain sum_k delta_k^2 D_{k+1}^2 <= 1.
IneqReport verify_e1(const KoetheMatrix& m, const OperatorMatrix& t, const DeadEndData& dd,
                     Rng& rng, std::size_t samples);

/// Tail sums sum_{n>k} (a_{k,n}/b_{inf,n})^2 <= 1 per grade, plus the norm
/// sandwich |x|_k <= ||x||_k on random probes.
IneqReport verify_inclusions(const KoetheMatrix& m, const DeadEndData& dd, Rng& rng,
                             std::size_t samples);

/// The multiplier chain for grade r:
///   (e2)  ||x||_inf <= |(a_{r+1}/a_r) x|_inf
///         ||(a_{r+1}/a_r) x||_inf <= (D_{r+1}^2+1)^{1/2} |x|_{inf,0}
///   (e4)  ||J_r |T'| x||_inf <= M_r |x|_{inf,0}
IneqReport verify_multipliers(const KoetheMatrix& m, const OperatorMatrix& t,
                              const DeadEndData& dd, std::size_t r, Rng& rng,
                              std::size_t samples);

} // namespace klab
