#include "klab/cone.hpp"

#include <algorithm>
#include <cmath>

namespace klab {

double weighted_row_norm(const Mat& a, const KoetheMatrix& m, std::size_t r) {
    double worst = 0.0;
    for (std::size_t i = 1; i <= a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 1; j <= a.cols(); ++j)
            s += std::abs(a(i - 1, j - 1)) / m.at(r, j);
        worst = std::max(worst, m.at(r, i) * s);
    }
    return worst;
}

double weighted_row_norm_inf(const Mat& a, const DeadEndData& dd) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j)) / dd.a_inf[j];
        worst = std::max(worst, dd.a_inf[i] * s);
    }
    return worst;
}

ConeContext build_context(const KoetheMatrix& m, const DeadEndData& dd, const OperatorMatrix& t,
                          std::size_t r, std::size_t n_trunc) {
    const std::size_t N = m.dim();
    if (r < 1 || dd.K_inf < 2 || r > dd.K_inf - 1)
        throw IndexError("build_context: cone grade r out of range");
    if (n_trunc < 1 || n_trunc > N) throw IndexError("build_context: truncation level out of range");
    if (t.dim() != N) throw DimensionError("build_context: operator dimension mismatch");

    ConeContext ctx;
    ctx.r = r;
    ctx.n_trunc = n_trunc;
    ctx.m = &m;
    ctx.jr.resize(N);
    ctx.jr_prime.resize(N);
    for (std::size_t n = 1; n <= N; ++n) {
        ctx.jr[n - 1] = m.at(r + 1, n) / m.at(r, n);
        ctx.jr_prime[n - 1] = m.at(1, n) / m.at(r + 2, n);
    }

    ctx.a_op = Mat(N, N);
    for (std::size_t i = 1; i <= N; ++i)
        for (std::size_t j = 1; j <= n_trunc; ++j)
            ctx.a_op(i - 1, j - 1) = ctx.jr[i - 1] * std::abs(t.at(i, j)) * ctx.jr_prime[j - 1];

    ctx.nu = weighted_row_norm(ctx.a_op, m, r);
    if (ctx.nu > 0.5)
        throw ConditionViolationError("build_context: ||A||_{G_r} exceeds 1/2; operator not rescaled");

    Mat b = Mat::identity(N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) b(i, j) -= ctx.a_op(i, j);
    ctx.b_inv = invert(b);
    ctx.b_inv_norm = weighted_row_norm(ctx.b_inv, m, r);

    // Cross-check the direct inverse against the truncated Neumann series,
    // truncated where the geometric tail drops below 1e-12.
    std::size_t terms = 1;
    if (ctx.nu > 0.0) {
        double tail = ctx.nu / (1.0 - ctx.nu);
        while (tail >= 1e-12 && terms < 4096) {
            tail *= ctx.nu;
            ++terms;
        }
    }
    Mat partial = Mat::identity(N);
    Mat power = Mat::identity(N);
    for (std::size_t p = 1; p <= terms; ++p) {
        power = matmul(power, ctx.a_op);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) partial(i, j) += power(i, j);
    }
    Mat diff(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) diff(i, j) = ctx.b_inv(i, j) - partial(i, j);
    ctx.neumann_gap = weighted_row_norm(diff, m, r);
    return ctx;
}

bool cone_member(const ConeContext& ctx, const Vec& x, double tau_cone) {
    if (x.size() != ctx.a_op.rows()) throw DimensionError("cone_member: length mismatch");
    const double slack = tau_cone * sup_norm(*ctx.m, x, ctx.r);
    const Vec ax = ctx.apply_a(x);
    for (std::size_t n = 0; n < x.size(); ++n) {
        if (x[n] < -slack) return false;
        if (x[n] < ax[n] - slack) return false;
    }
    return true;
}

Decomposition decompose(const ConeContext& ctx, const Vec& x) {
    const Vec ax = ctx.apply_a(x);
    Vec pos(x.size()), neg(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double bx = x[n] - ax[n];
        pos[n] = std::max(bx, 0.0);
        neg[n] = std::max(-bx, 0.0);
    }
    return Decomposition{ctx.apply_b_inv(pos), ctx.apply_b_inv(neg)};
}

Vec apply_s(const ConeContext& ctx, const OperatorMatrix& t, const BasisExpansion& e,
            std::size_t n, const Vec& x) {
    return apply_projected(*ctx.m, t, e, n, ctx.apply_jr_prime_trunc(x));
}

EndpointReport endpoint_inequalities(const ConeContext& ctx, const OperatorMatrix& t,
                                     const BasisExpansion& e, const DeadEndData& dd,
                                     std::size_t n, Rng& rng, std::size_t samples) {
    const KoetheMatrix& m = *ctx.m;
    const std::size_t N = m.dim();
    EndpointReport rep;
    for (std::size_t p = 0; p < samples; ++p) {
        const Vec x = rng.uniform_vec(N);
        const double denom = sup_norm(m, x, 1);
        if (denom > 0.0)
            rep.worst_g1_ratio =
                std::max(rep.worst_g1_ratio, sup_norm(m, apply_s(ctx, t, e, n, x), 1) / denom);

        const Vec c = ctx.apply_b_inv(rng.uniform_vec(N));
        const double cd = inf_sup(dd, c);
        if (cd > 0.0)
            rep.worst_ginf_ratio =
                std::max(rep.worst_ginf_ratio, inf_sup(dd, apply_s(ctx, t, e, n, c)) / cd);
    }
    rep.pass = rep.worst_g1_ratio <= 1.0 + 1e-9 && rep.worst_ginf_ratio <= 1.0 + 1e-9;
    return rep;
}

double estimate_interpolation_constant(const ConeContext& ctx, const OperatorMatrix& t,
                                       const BasisExpansion& e, Rng& rng, std::size_t samples) {
    const KoetheMatrix& m = *ctx.m;
    const std::size_t N = m.dim();
    std::vector<Vec> probes;
    probes.reserve(samples + N);
    for (std::size_t p = 0; p < samples; ++p) probes.push_back(ctx.apply_b_inv(rng.uniform_vec(N)));
    for (std::size_t i = 0; i < N; ++i) {
        Vec ei(N, 0.0);
        ei[i] = 1.0;
        probes.push_back(ctx.apply_b_inv(ei));
    }
    double c_hat = 0.0;
    for (const Vec& x : probes) {
        const double denom = sup_norm(m, x, ctx.r);
        if (denom == 0.0) continue;
        for (std::size_t n = 1; n <= e.d; ++n)
            c_hat = std::max(c_hat, sup_norm(m, apply_s(ctx, t, e, n, x), ctx.r) / denom);
    }
    return c_hat;
}

EquicontinuityReport equicontinuity_check(const KoetheMatrix& m, const BasisExpansion& e,
                                          const OperatorMatrix& t, std::size_t r, double c_hat,
                                          Rng& rng, std::size_t samples) {
    const std::size_t N = m.dim();
    if (r + 3 > m.grades()) throw InsufficientGradesError("equicontinuity_check: needs r + 3 <= K");
    EquicontinuityReport rep;
    rep.bound_used = 8.0 * c_hat;
    std::vector<Vec> probes;
    for (std::size_t i = 0; i < N; ++i) {
        Vec ei(N, 0.0);
        ei[i] = 1.0;
        probes.push_back(std::move(ei));
    }
    for (std::size_t p = 0; p < samples; ++p) probes.push_back(rng.symmetric_vec(N));
    for (const Vec& x : probes) {
        const double denom = rep.bound_used * sup_norm(m, x, r + 3);
        if (denom == 0.0) continue;
        for (std::size_t n = 1; n <= e.d; ++n)
            rep.worst_ratio =
                std::max(rep.worst_ratio, sup_norm(m, apply_projected(m, t, e, n, x), r) / denom);
    }
    rep.pass = rep.worst_ratio <= 1.0;
    return rep;
}

HypothesisReport hypothesis_checks(const ConeContext& ctx, const DeadEndData& dd, Rng& rng,
                                   std::size_t samples) {
    const KoetheMatrix& m = *ctx.m;
    const std::size_t N = m.dim();
    const double tau = 1e-12;
    HypothesisReport rep;

    for (std::size_t p = 0; p < samples; ++p) {
        // 1. Lower semi-lattice: min of two cone members stays inside.
        const Vec x = ctx.apply_b_inv(rng.uniform_vec(N));
        const Vec y = ctx.apply_b_inv(rng.uniform_vec(N));
        Vec mn(N);
        for (std::size_t i = 0; i < N; ++i) mn[i] = std::min(x[i], y[i]);
        if (!cone_member(ctx, mn, tau)) rep.semilattice = false;

        // 2. Totality: every vector splits into a difference of cone members.
        const Vec w = rng.symmetric_vec(N);
        const Decomposition dec = decompose(ctx, w);
        if (!cone_member(ctx, dec.y, tau) || !cone_member(ctx, dec.z, tau)) rep.total = false;
        const Vec back = axpy(-1.0, dec.z, dec.y);
        const double err = sup_norm(m, axpy(-1.0, back, w), ctx.r);
        if (err > 1e-12 * std::max(1.0, sup_norm(m, w, ctx.r))) rep.total = false;
    }
    rep.g_inf_norm = weighted_row_norm_inf(ctx.a_op, dd);

    // 3. Strictly positive element: x = B^{-1}x0 dominates x0 entrywise.
    double hi = dd.a_inf[0];
    for (double v : dd.a_inf) hi = std::max(hi, v);
    const Vec x0(N, 1.0 / hi);
    const Vec xp = ctx.apply_b_inv(x0);
    for (std::size_t i = 0; i < N; ++i)
        if (xp[i] < x0[i] * (1.0 - 1e-12)) rep.strictly_positive = false;

    rep.pass = rep.semilattice && rep.total && rep.strictly_positive &&
               std::isfinite(rep.g_inf_norm);
    return rep;
}

} // namespace klab
