#include "klab/operator.hpp"

#include <cmath>
#include <string>

namespace klab {

OperatorMatrix::OperatorMatrix(std::size_t N, Vec entries) : N_(N), t_(std::move(entries)) {
    if (t_.size() != N_ * N_) throw DimensionError("operator grid size does not match N*N");
    for (double v : t_)
        if (!std::isfinite(v)) throw InvalidMatrixError("operator entry not finite");
}

Vec OperatorMatrix::apply(const Vec& x) const {
    if (x.size() != N_) throw DimensionError("apply: vector length mismatch");
    Vec y(N_, 0.0);
    for (std::size_t i = 1; i <= N_; ++i) {
        double s = 0.0;
        for (std::size_t j = 1; j <= N_; ++j) s += at(i, j) * x[j - 1];
        y[i - 1] = s;
    }
    return y;
}

OperatorMatrix modulus(const OperatorMatrix& t) {
    Vec abs_entries = t.entries();
    for (double& v : abs_entries) v = std::abs(v);
    OperatorMatrix m(t.dim(), std::move(abs_entries));
    m.set_scale(t.scale_applied());
    return m;
}

double grade_norm(const OperatorMatrix& t, const KoetheMatrix& m, std::size_t k) {
    if (k < 1 || k >= m.grades()) throw IndexError("grade_norm: need 1 <= k < K");
    if (t.dim() != m.dim()) throw DimensionError("grade_norm: operator/matrix dimension mismatch");
    const std::size_t n = t.dim();
    double total = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        double row = 0.0;
        for (std::size_t j = 1; j <= n; ++j) row += std::abs(t.at(i, j)) / m.at(k + 1, j);
        const double term = m.at(k, i) * row;
        total += term * term;
    }
    return std::sqrt(total);
}

RescaleResult rescale_to_contraction(const OperatorMatrix& t, const KoetheMatrix& m) {
    double worst = 0.0;
    for (std::size_t k = 1; k < m.grades(); ++k) worst = std::max(worst, grade_norm(t, m, k));
    if (worst == 0.0) {
        bool zero = true;
        for (double v : t.entries()) zero = zero && v == 0.0;
        if (zero) throw DegenerateOperatorError("rescale: zero operator has trivial range");
    }
    double c = std::min(1.0, 1.0 / (2.0 * worst));
    auto scale = [&](double factor) {
        Vec scaled = t.entries();
        for (double& v : scaled) v *= factor;
        OperatorMatrix out(t.dim(), std::move(scaled));
        out.set_scale(factor);
        return out;
    };
    OperatorMatrix out = scale(c);
    // Rounding in grade_norm(c*T) can overshoot 1/2 by an ulp; shave c until
    // the bound holds exactly.
    for (int guard = 0; guard < 64; ++guard) {
        double post = 0.0;
        for (std::size_t k = 1; k < m.grades(); ++k) post = std::max(post, grade_norm(out, m, k));
        if (post <= 0.5 || c == 1.0) break;
        c *= 1.0 - 0x1.0p-50;
        out = scale(c);
    }
    return RescaleResult{std::move(out), c};
}

double row_sum_sup(const OperatorMatrix& t) {
    double sup = 0.0;
    for (std::size_t i = 1; i <= t.dim(); ++i) {
        double s = 0.0;
        for (std::size_t j = 1; j <= t.dim(); ++j) s += std::abs(t.at(i, j));
        sup = std::max(sup, s);
    }
    return sup;
}

} // namespace klab
