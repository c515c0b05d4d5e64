#include "klab/deadend.hpp"

#include <algorithm>
#include <cmath>

namespace klab {

Vec dominating_weight(const KoetheMatrix& m) {
    const std::size_t K = m.grades(), N = m.dim();
    Vec b(N);
    for (std::size_t n = 1; n <= N; ++n) b[n - 1] = m.at(std::min(n, K), n);
    return b;
}

Vec compute_D(const KoetheMatrix& m) {
    const Vec b = dominating_weight(m);
    const std::size_t K = m.grades(), N = m.dim();
    Vec D(K);
    double running = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
        double s = 0.0;
        for (std::size_t n = 1; n <= N; ++n) {
            const double r = m.at(k, n) / b[n - 1];
            s += r * r;
        }
        running = std::max(running, std::sqrt(s));
        D[k - 1] = running;
    }
    return D;
}

DeadEndData build_deadend(const KoetheMatrix& m) {
    const std::size_t K = m.grades(), N = m.dim();
    if (K < 3) throw InsufficientGradesError("dead-end spaces need K >= 3 grades");
    DeadEndData dd;
    dd.D = compute_D(m);
    dd.K_inf = K - 2;
    dd.b_inf = dominating_weight(m);
    dd.delta.resize(dd.K_inf);
    for (std::size_t k = 1; k <= dd.K_inf; ++k)
        dd.delta[k - 1] = 1.0 / (std::ldexp(1.0, static_cast<int>(k)) * dd.D[k + 1]);
    dd.a_inf.resize(N);
    for (std::size_t n = 1; n <= N; ++n) {
        double s = 0.0;
        for (std::size_t k = 1; k <= dd.K_inf; ++k) {
            const double t = dd.delta[k - 1] * m.at(k, n);
            s += t * t;
        }
        dd.a_inf[n - 1] = std::sqrt(s);
    }
    dd.M.resize(K - 2);
    for (std::size_t r = 1; r <= K - 2; ++r) dd.M[r - 1] = std::sqrt(dd.D[r + 1] * dd.D[r + 1] + 1.0);
    return dd;
}

double inf_hilbert(const DeadEndData& dd, const Vec& x) {
    if (x.size() != dd.a_inf.size()) throw DimensionError("inf_hilbert: length mismatch");
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double t = x[n] * dd.a_inf[n];
        s += t * t;
    }
    return std::sqrt(s);
}

double inf_hilbert_gradewise(const KoetheMatrix& m, const DeadEndData& dd, const Vec& x) {
    double s = 0.0;
    for (std::size_t k = 1; k <= dd.K_inf; ++k) {
        const double t = dd.delta[k - 1] * hilbert_norm(m, x, k);
        s += t * t;
    }
    return std::sqrt(s);
}

double inf_sup(const DeadEndData& dd, const Vec& x) {
    if (x.size() != dd.a_inf.size()) throw DimensionError("inf_sup: length mismatch");
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s = std::max(s, std::abs(x[n]) * dd.a_inf[n]);
    return s;
}

double inf_zero(const DeadEndData& dd, const Vec& x) {
    if (x.size() != dd.b_inf.size()) throw DimensionError("inf_zero: length mismatch");
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s = std::max(s, std::abs(x[n]) * dd.b_inf[n]);
    return s;
}

double inf_inner(const DeadEndData& dd, const Vec& x, const Vec& y) {
    if (x.size() != dd.a_inf.size() || y.size() != dd.a_inf.size())
        throw DimensionError("inf_inner: length mismatch");
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s += dd.a_inf[n] * dd.a_inf[n] * x[n] * y[n];
    return s;
}

namespace {

void record(IneqCheck& c, double lhs, double rhs, std::size_t probe) {
    const double ratio = (lhs == 0.0) ? 0.0 : lhs / rhs;
    if (ratio > c.worst_ratio) {
        c.worst_ratio = ratio;
        c.witness = probe;
    }
}

} // namespace

IneqReport verify_e1(const KoetheMatrix& m, const OperatorMatrix& t, const DeadEndData& dd,
                     Rng& rng, std::size_t samples) {
    const std::size_t N = m.dim();
    IneqReport rep;

    IneqCheck chain{"delta-chain: sum delta_k^2 D_{k+1}^2 <= 1"};
    double s = 0.0;
    for (std::size_t k = 1; k <= dd.K_inf; ++k) {
        const double term = dd.delta[k - 1] * dd.D[k];
        s += term * term;
    }
    chain.worst_ratio = s;
    chain.pass = s <= 1.0;
    rep.checks.push_back(chain);

    IneqCheck e1{"e1: ||T'x||_inf <= |x|_{inf,0}"};
    Vec extreme(N);
    for (std::size_t n = 0; n < N; ++n) extreme[n] = 1.0 / dd.b_inf[n];
    record(e1, inf_hilbert(dd, t.apply(extreme)), inf_zero(dd, extreme), 0);
    for (std::size_t p = 1; p <= samples; ++p) {
        const Vec x = rng.symmetric_vec(N);
        record(e1, inf_hilbert(dd, t.apply(x)), inf_zero(dd, x), p);
    }
    e1.pass = e1.worst_ratio <= e1.bound;
    rep.checks.push_back(e1);
    return rep;
}

IneqReport verify_inclusions(const KoetheMatrix& m, const DeadEndData& dd, Rng& rng,
                             std::size_t samples) {
    const std::size_t K = m.grades(), N = m.dim();
    IneqReport rep;

    IneqCheck tails{"inclusion tails: sum_{n>k} (a_{k,n}/b_{inf,n})^2 <= 1"};
    for (std::size_t k = 1; k < K; ++k) {
        double s = 0.0;
        for (std::size_t n = k + 1; n <= N; ++n) {
            const double r = m.at(k, n) / dd.b_inf[n - 1];
            s += r * r;
        }
        if (s > tails.worst_ratio) {
            tails.worst_ratio = s;
            tails.witness = k;
        }
    }
    tails.pass = tails.worst_ratio <= 1.0;
    rep.checks.push_back(tails);

    IneqCheck sandwich{"sandwich: |x|_k <= ||x||_k"};
    for (std::size_t p = 1; p <= samples; ++p) {
        const Vec x = rng.symmetric_vec(N);
        for (std::size_t k = 1; k <= K; ++k)
            record(sandwich, sup_norm(m, x, k), hilbert_norm(m, x, k), p);
    }
    sandwich.pass = sandwich.worst_ratio <= 1.0;
    rep.checks.push_back(sandwich);
    return rep;
}

IneqReport verify_multipliers(const KoetheMatrix& m, const OperatorMatrix& t,
                              const DeadEndData& dd, std::size_t r, Rng& rng,
                              std::size_t samples) {
    const std::size_t N = m.dim();
    if (r < 1 || r + 1 > dd.K_inf) throw IndexError("verify_multipliers: r out of range");
    const OperatorMatrix abs_t = modulus(t);

    auto multiply_jr = [&](const Vec& x) {
        Vec y(N);
        for (std::size_t n = 1; n <= N; ++n) y[n - 1] = m.at(r + 1, n) / m.at(r, n) * x[n - 1];
        return y;
    };

    IneqReport rep;
    IneqCheck e2{"e2: ||x||_inf <= |J_r x|_inf"};
    IneqCheck mult{"multiplier: ||J_r x||_inf <= sqrt(D_{r+1}^2+1) |x|_{inf,0}"};
    IneqCheck e4{"e4: ||J_r |T'| x||_inf <= M_r |x|_{inf,0}"};
    const double mult_bound = std::sqrt(dd.D[r] * dd.D[r] + 1.0);
    const double m_r = dd.M[r - 1];

    Vec extreme(N);
    for (std::size_t n = 0; n < N; ++n) extreme[n] = 1.0 / dd.b_inf[n];

    for (std::size_t p = 0; p <= samples; ++p) {
        Vec x = (p == 0) ? extreme : rng.uniform_vec(N);
        const Vec jx = multiply_jr(x);
        record(e2, inf_hilbert(dd, x), inf_sup(dd, jx), p);
        record(mult, inf_hilbert(dd, jx), mult_bound * inf_zero(dd, x), p);
        record(e4, inf_hilbert(dd, multiply_jr(abs_t.apply(x))), m_r * inf_zero(dd, x), p);
    }
    e2.pass = e2.worst_ratio <= 1.0;
    mult.pass = mult.worst_ratio <= 1.0;
    e4.pass = e4.worst_ratio <= 1.0;
    rep.checks.push_back(e2);
    rep.checks.push_back(mult);
    rep.checks.push_back(e4);
    return rep;
}

} // namespace klab
