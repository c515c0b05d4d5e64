#include "klab/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace klab {

RangeSubspace range_basis(const OperatorMatrix& t, const KoetheMatrix& m, double tau_rank) {
    const std::size_t N = m.dim();
    if (t.dim() != N) throw DimensionError("range_basis: operator/matrix dimension mismatch");

    // Candidate columns of T.
    std::vector<Vec> cols(N, Vec(N));
    for (std::size_t j = 1; j <= N; ++j)
        for (std::size_t i = 1; i <= N; ++i) cols[j - 1][i - 1] = t.at(i, j);

    std::vector<Vec> basis;
    double largest_pivot = 0.0;
    std::vector<bool> used(N, false);
    for (;;) {
        // Pick the remaining column with the largest H_1 residual norm.
        std::size_t best = N;
        double best_norm = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            if (used[j]) continue;
            const double nrm = hilbert_norm(m, cols[j], 1);
            if (nrm > best_norm) {
                best_norm = nrm;
                best = j;
            }
        }
        if (best == N) break;
        if (largest_pivot == 0.0) largest_pivot = best_norm;
        if (best_norm <= tau_rank * largest_pivot) break;
        used[best] = true;
        Vec q = cols[best];
        for (double& v : q) v /= best_norm;
        // Re-orthogonalize once against the accepted set.
        for (int pass = 0; pass < 2; ++pass) {
            for (const Vec& b : basis) {
                const double c = grade_inner(m, q, b, 1);
                q = axpy(-c, b, q);
            }
            const double nrm = hilbert_norm(m, q, 1);
            if (nrm == 0.0) break;
            for (double& v : q) v /= nrm;
        }
        // Deflate the remaining columns.
        for (std::size_t j = 0; j < N; ++j) {
            if (used[j]) continue;
            const double c = grade_inner(m, cols[j], q, 1);
            cols[j] = axpy(-c, q, cols[j]);
        }
        basis.push_back(std::move(q));
    }
    if (basis.empty()) throw EmptyRangeError("range_basis: operator has trivial range");

    RangeSubspace sub;
    sub.d = basis.size();
    sub.span = Mat(N, sub.d);
    for (std::size_t j = 0; j < sub.d; ++j)
        for (std::size_t i = 0; i < N; ++i) sub.span(i, j) = basis[j][i];
    return sub;
}

BasisExpansion extract_basis(const RangeSubspace& sub, const KoetheMatrix& m,
                             const DeadEndData& dd, double tau_rank) {
    const std::size_t N = m.dim(), d = sub.d;
    if (d < 1) throw EmptyRangeError("extract_basis: empty span");

    std::vector<Vec> cols(d, Vec(N));
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < N; ++i) cols[j][i] = sub.span(i, j);

    Mat g1(d, d), ginf(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            g1(i, j) = grade_inner(m, cols[i], cols[j], 1);
            ginf(i, j) = inf_inner(dd, cols[i], cols[j]);
        }

    // Condition guard on the H_1 Gram before reducing the pair.
    {
        EigenDecomposition ev = jacobi_eigen(g1);
        double lo = ev.values[0], hi = ev.values[0];
        for (double v : ev.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo <= 0.0 || hi / lo > 1.0 / tau_rank)
            throw IllConditionedError("extract_basis: H_1 Gram condition exceeds 1/tau_rank");
    }

    // Reduce Ginf v = lambda G1 v with G1 = L L^T to the symmetric problem
    // (L^-1 Ginf L^-T) u = lambda u.
    const Mat l = cholesky(g1);
    Mat reduced(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        Vec col(d);
        for (std::size_t i = 0; i < d; ++i) col[i] = ginf(i, j);
        Vec y = solve_lower(l, col);
        for (std::size_t i = 0; i < d; ++i) reduced(i, j) = y[i];
    }
    // Right-multiply by L^-T: solve on rows.
    for (std::size_t i = 0; i < d; ++i) {
        Vec row(d);
        for (std::size_t j = 0; j < d; ++j) row[j] = reduced(i, j);
        Vec y = solve_lower(l, row);
        for (std::size_t j = 0; j < d; ++j) reduced(i, j) = y[j];
    }
    // Symmetrize away the reduction round-off.
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            const double s = 0.5 * (reduced(i, j) + reduced(j, i));
            reduced(i, j) = reduced(j, i) = s;
        }

    EigenDecomposition ev = jacobi_eigen(reduced);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ev.values[a] > ev.values[b]; });

    BasisExpansion e;
    e.d = d;
    e.f = Mat(N, d);
    e.lambda.resize(d);
    for (std::size_t out = 0; out < d; ++out) {
        const std::size_t j = order[out];
        Vec u(d);
        for (std::size_t i = 0; i < d; ++i) u[i] = ev.vectors(i, j);
        Vec v = solve_lower_transposed(l, u);
        Vec fj(N, 0.0);
        for (std::size_t c = 0; c < d; ++c) fj = axpy(v[c], cols[c], fj);
        const double nrm = hilbert_norm(m, fj, 1);
        for (double& x : fj) x /= nrm;
        for (std::size_t i = 0; i < N; ++i) e.f(i, out) = fj[i];
        e.lambda[out] = inf_inner(dd, fj, fj);
    }

    // Residual diagnostics: Gram of the extracted system in both products.
    double worst = 0.0;
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t j = 1; j <= d; ++j) {
            const Vec fi = e.vector(i), fj = e.vector(j);
            const double g1ij = grade_inner(m, fi, fj, 1);
            worst = std::max(worst, std::abs(g1ij - (i == j ? 1.0 : 0.0)));
            if (i != j) {
                const double gij = inf_inner(dd, fi, fj);
                const double scale = std::sqrt(e.lambda[i - 1] * e.lambda[j - 1]);
                worst = std::max(worst, scale > 0.0 ? std::abs(gij) / scale : std::abs(gij));
            }
        }
    e.orth_residual = worst;
    return e;
}

Vec expand(const KoetheMatrix& m, const BasisExpansion& e, const Vec& x) {
    Vec c(e.d);
    for (std::size_t j = 1; j <= e.d; ++j) c[j - 1] = grade_inner(m, x, e.vector(j), 1);
    return c;
}

Vec reconstruct(const BasisExpansion& e, const Vec& coefficients) {
    if (coefficients.size() != e.d) throw DimensionError("reconstruct: coefficient count mismatch");
    Vec x(e.f.rows(), 0.0);
    for (std::size_t j = 1; j <= e.d; ++j) x = axpy(coefficients[j - 1], e.vector(j), x);
    return x;
}

double range_residual(const KoetheMatrix& m, const BasisExpansion& e, const Vec& x) {
    const Vec r = axpy(-1.0, reconstruct(e, expand(m, e, x)), x);
    const double nx = hilbert_norm(m, x, 1);
    if (nx == 0.0) return 0.0;
    return hilbert_norm(m, r, 1) / nx;
}

Vec apply_projected(const KoetheMatrix& m, const OperatorMatrix& t, const BasisExpansion& e,
                    std::size_t n, const Vec& x) {
    if (n > e.d) throw IndexError("apply_projected: truncation level beyond rank");
    const Vec tx = t.apply(x);
    Vec y(x.size(), 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
        const Vec fj = e.vector(j);
        y = axpy(grade_inner(m, tx, fj, 1), fj, y);
    }
    return y;
}

ContractionReport verify_contractions(const KoetheMatrix& m, const OperatorMatrix& t,
                                      const DeadEndData& dd, const BasisExpansion& e, Rng& rng,
                                      std::size_t samples) {
    const std::size_t N = m.dim();
    ContractionReport rep;
    for (std::size_t p = 0; p < samples; ++p) {
        const Vec x = rng.symmetric_vec(N);
        const Vec tx = t.apply(x);
        const double h1 = hilbert_norm(m, tx, 1);
        const double hinf = inf_hilbert(dd, tx);
        double prev_err = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n <= e.d; ++n) {
            const Vec tnx = apply_projected(m, t, e, n, x);
            if (h1 > 0.0)
                rep.worst_h1_ratio = std::max(rep.worst_h1_ratio, hilbert_norm(m, tnx, 1) / h1);
            if (hinf > 0.0)
                rep.worst_inf_ratio = std::max(rep.worst_inf_ratio, inf_hilbert(dd, tnx) / hinf);
            const double err = inf_hilbert(dd, axpy(-1.0, tx, tnx));
            if (n > 0 && err > prev_err + 1e-12 * std::max(1.0, hinf)) rep.monotone = false;
            prev_err = err;
            if (n == e.d) rep.final_error = std::max(rep.final_error, err / std::max(1.0, hinf));
        }
    }
    const double slack = 1.0 + 1e-12;
    rep.pass = rep.worst_h1_ratio <= slack && rep.worst_inf_ratio <= slack && rep.monotone &&
               rep.final_error <= 1e-9;
    return rep;
}

} // namespace klab
