#include "klab/koethe.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace klab {

KoetheMatrix::KoetheMatrix(std::size_t K, std::size_t N, Vec grid) : K_(K), N_(N), a_(std::move(grid)) {
    if (K_ == 0 || N_ == 0) throw InvalidMatrixError("matrix needs at least one grade and one coordinate");
    if (a_.size() != K_ * N_)
        throw InvalidMatrixError("grid size " + std::to_string(a_.size()) + " does not match K*N");
}

ConditionReport verify_conditions(KoetheMatrix& m) {
    const std::size_t K = m.grades(), N = m.dim();
    ConditionReport rep;

    for (std::size_t k = 1; k <= K; ++k)
        for (std::size_t n = 1; n <= N; ++n) {
            const double v = m.at(k, n);
            if (!(v > 0.0) || !std::isfinite(v))
                throw InvalidMatrixError("entry a_{" + std::to_string(k) + "," + std::to_string(n) +
                                         "} is not strictly positive and finite");
            if (!std::isfinite(v * v))
                throw InvalidMatrixError("entry a_{" + std::to_string(k) + "," + std::to_string(n) +
                                         "} overflows when squared");
            if (v > rep.max_entry) rep.max_entry = v;
        }

    // Condition 1: a_{1,n} = 1 exactly.
    {
        auto& c = rep.condition[0];
        c.margin = 0.0;
        for (std::size_t n = 1; n <= N; ++n) {
            const double dev = std::abs(m.at(1, n) - 1.0);
            if (dev > -c.margin) {
                c.margin = -dev;
                c.worst_k = 1;
                c.worst_n = n;
            }
        }
        c.pass = (c.margin == 0.0);
    }

    // Condition 2: a_{k,n}^2 <= a_{k+1,n}.
    {
        auto& c = rep.condition[1];
        if (K < 2) {
            c.applicable = false;
        } else {
            c.margin = std::numeric_limits<double>::infinity();
            for (std::size_t k = 1; k < K; ++k)
                for (std::size_t n = 1; n <= N; ++n) {
                    const double slack = m.at(k + 1, n) - m.at(k, n) * m.at(k, n);
                    if (slack < c.margin) {
                        c.margin = slack;
                        c.worst_k = k;
                        c.worst_n = n;
                    }
                }
            c.pass = (c.margin >= 0.0);
        }
    }

    // Condition 3: sum_n a_{k,n}/a_{k+1,n} <= 1.
    {
        auto& c = rep.condition[2];
        if (K < 2) {
            c.applicable = false;
        } else {
            c.margin = std::numeric_limits<double>::infinity();
            for (std::size_t k = 1; k < K; ++k) {
                double s = 0.0;
                for (std::size_t n = 1; n <= N; ++n) s += m.at(k, n) / m.at(k + 1, n);
                const double slack = 1.0 - s;
                if (slack < c.margin) {
                    c.margin = slack;
                    c.worst_k = k;
                    c.worst_n = 0;
                }
            }
            c.pass = (c.margin >= 0.0);
        }
    }

    // Condition 4: ratios a_{k,n}/a_{k+1,n} nonincreasing in n.
    {
        auto& c = rep.condition[3];
        if (K < 2 || N < 2) {
            c.applicable = false;
        } else {
            c.margin = std::numeric_limits<double>::infinity();
            for (std::size_t k = 1; k < K; ++k)
                for (std::size_t n = 1; n < N; ++n) {
                    const double slack = m.at(k, n) / m.at(k + 1, n) - m.at(k, n + 1) / m.at(k + 1, n + 1);
                    if (slack < c.margin) {
                        c.margin = slack;
                        c.worst_k = k;
                        c.worst_n = n;
                    }
                }
            c.pass = (c.margin >= 0.0);
        }
    }

    rep.all_pass = true;
    for (const auto& c : rep.condition) rep.all_pass = rep.all_pass && c.pass;
    m.set_normalized(rep.all_pass);
    return rep;
}

NormalizeResult normalize(const KoetheMatrix& raw) {
    const std::size_t K = raw.grades(), N = raw.dim();
    for (std::size_t k = 1; k <= K; ++k)
        for (std::size_t n = 1; n <= N; ++n) {
            const double v = raw.at(k, n);
            if (!(v > 0.0) || !std::isfinite(v))
                throw InvalidMatrixError("raw matrix has a nonpositive or nonfinite entry");
        }
    for (std::size_t k = 1; k < K; ++k)
        for (std::size_t n = 1; n <= N; ++n)
            if (raw.at(k, n) > raw.at(k + 1, n))
                throw InvalidMatrixError("raw matrix is not grade-monotone at (" + std::to_string(k) +
                                         "," + std::to_string(n) + ")");
    // Regularity is the standing hypothesis; a violation is not repairable here.
    for (std::size_t k = 1; k < K; ++k)
        for (std::size_t n = 1; n < N; ++n)
            if (raw.at(k, n + 1) / raw.at(k + 1, n + 1) > raw.at(k, n) / raw.at(k + 1, n))
                throw NotRegularError("ratio column " + std::to_string(k) + " increases at n=" +
                                      std::to_string(n));
    if (K < 2) throw InsufficientGradesError("normalization needs at least 2 grades");

    NormalizeLog log;
    log.row_divisor.resize(N);
    for (std::size_t n = 1; n <= N; ++n) log.row_divisor[n - 1] = raw.at(1, n);

    // Step 1: divide every row by row 1 (a diagonal isomorphism of the space).
    std::vector<Vec> rows(K, Vec(N));
    for (std::size_t k = 1; k <= K; ++k)
        for (std::size_t n = 1; n <= N; ++n) rows[k - 1][n - 1] = raw.at(k, n) / raw.at(1, n);

    // Step 2: greedy forward pass with minimal scalars.
    Vec out;
    out.insert(out.end(), rows[0].begin(), rows[0].end());
    log.selected.push_back(1);
    log.scalars.push_back(1.0);
    Vec u = rows[0];
    std::size_t emitted = 1;
    for (std::size_t k = 2; k <= K; ++k) {
        const Vec& v = rows[k - 1];
        double c = 1.0;
        for (std::size_t n = 0; n < N; ++n) c = std::max(c, u[n] * u[n] / v[n]);
        double s = 0.0;
        for (std::size_t n = 0; n < N; ++n) s += u[n] / v[n];
        c = std::max(c, s);
        if (!std::isfinite(c)) throw InvalidMatrixError("normalization scalar overflowed at row " + std::to_string(k));
        // The minimal scalar satisfies the bounds only in exact arithmetic;
        // inflate by ulps until the rounded row does too.
        Vec scaled(N);
        bool ok = false;
        for (int guard = 0; guard < 64 && !ok; ++guard) {
            bool overflow = false;
            bool bounds = true;
            double check = 0.0;
            for (std::size_t n = 0; n < N; ++n) {
                scaled[n] = c * v[n];
                if (!std::isfinite(scaled[n] * scaled[n])) overflow = true;
                if (u[n] * u[n] > scaled[n]) bounds = false;
                check += u[n] / scaled[n];
            }
            if (overflow) break;
            ok = bounds && check <= 1.0;
            if (!ok) c *= 1.0 + 0x1.0p-50;
        }
        if (!ok) break; // further grades would overflow when squared
        out.insert(out.end(), scaled.begin(), scaled.end());
        log.selected.push_back(k);
        log.scalars.push_back(c);
        u = std::move(scaled);
        ++emitted;
    }
    if (emitted < 2) throw InsufficientGradesError("fewer than 2 rows selectable");

    KoetheMatrix m(emitted, N, std::move(out));
    ConditionReport rep = verify_conditions(m);
    if (!rep.all_pass) {
        std::size_t blocking = 0;
        for (std::size_t i = 0; i < 4; ++i)
            if (!rep.condition[i].pass) { blocking = rep.condition[i].worst_k; break; }
        throw InvalidMatrixError("normalization failed; blocking row " + std::to_string(blocking));
    }
    return NormalizeResult{std::move(m), std::move(log)};
}

double sup_norm(const KoetheMatrix& m, const Vec& x, std::size_t k) {
    if (k < 1 || k > m.grades()) throw IndexError("sup_norm: grade out of range");
    if (x.size() != m.dim()) throw DimensionError("sup_norm: vector length mismatch");
    double s = 0.0;
    for (std::size_t n = 1; n <= m.dim(); ++n) s = std::max(s, std::abs(x[n - 1]) * m.at(k, n));
    return s;
}

double hilbert_norm(const KoetheMatrix& m, const Vec& x, std::size_t k) {
    if (k < 1 || k > m.grades()) throw IndexError("hilbert_norm: grade out of range");
    if (x.size() != m.dim()) throw DimensionError("hilbert_norm: vector length mismatch");
    double s = 0.0;
    for (std::size_t n = 1; n <= m.dim(); ++n) {
        const double t = x[n - 1] * m.at(k, n);
        s += t * t;
    }
    return std::sqrt(s);
}

double grade_inner(const KoetheMatrix& m, const Vec& x, const Vec& y, std::size_t k) {
    if (k < 1 || k > m.grades()) throw IndexError("grade_inner: grade out of range");
    if (x.size() != m.dim() || y.size() != m.dim())
        throw DimensionError("grade_inner: vector length mismatch");
    double s = 0.0;
    for (std::size_t n = 1; n <= m.dim(); ++n) {
        const double a = m.at(k, n);
        s += a * a * x[n - 1] * y[n - 1];
    }
    return s;
}

} // namespace klab
