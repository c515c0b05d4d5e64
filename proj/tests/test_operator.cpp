#include <doctest.h>

#include <cmath>

#include "klab/operator.hpp"
#include "klab/pipeline.hpp"

using namespace klab;

namespace {

KoetheMatrix demo_matrix() {
    Json spec{{"family", "geometric"}, {"base", 4.0}, {"exponents", {0.0, 1.0, 3.0, 7.0}}, {"N", 4}};
    KoetheMatrix m = matrix_from_spec(spec);
    verify_conditions(m);
    return m;
}

OperatorMatrix diag_projection(std::size_t N, std::size_t upto) {
    Vec grid(N * N, 0.0);
    for (std::size_t i = 0; i < upto; ++i) grid[i * N + i] = 1.0;
    return OperatorMatrix(N, std::move(grid));
}

} // namespace

TEST_CASE("identity operator application") {
    Vec grid(16, 0.0);
    for (int i = 0; i < 4; ++i) grid[i * 4 + i] = 1.0;
    OperatorMatrix t(4, grid);
    Rng rng(2);
    const Vec x = rng.symmetric_vec(4);
    const Vec y = t.apply(x);
    for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("modulus vs cancellation") {
    Vec grid(16, 0.0);
    grid[0] = 1.0;
    grid[1] = -1.0;
    OperatorMatrix t(4, grid);
    const Vec x{1.0, 1.0, 0.0, 0.0};
    CHECK(t.apply(x)[0] == 0.0);
    CHECK(modulus(t).apply(x)[0] == 2.0);
}

TEST_CASE("modulus domination on random sign matrices") {
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        Vec grid(16);
        for (auto& v : grid) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
        OperatorMatrix t(4, grid);
        const OperatorMatrix at = modulus(t);
        const Vec x = rng.symmetric_vec(4);
        Vec ax(4);
        for (std::size_t i = 0; i < 4; ++i) ax[i] = std::abs(x[i]);
        const Vec tx = t.apply(x);
        const Vec bound = at.apply(ax);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(tx[i]) <= bound[i] + 1e-12);
    }
}

TEST_CASE("grade_norm closed form on the demo projection") {
    const KoetheMatrix m = demo_matrix();
    auto mm = m;
    const OperatorMatrix t = diag_projection(4, 2);
    const double g = grade_norm(t, mm, 1);
    // (a_{1,1}/a_{2,1})^2 + (a_{1,2}/a_{2,2})^2 = 1/16 + 1/256
    const double expected = std::sqrt(1.0 / 16.0 + 1.0 / 256.0);
    CHECK(g == doctest::Approx(expected).epsilon(1e-15));
    CHECK(g == doctest::Approx(0.2577).epsilon(1e-3));
}

TEST_CASE("grade_norm of the zero operator is zero") {
    auto m = demo_matrix();
    OperatorMatrix t(4, Vec(16, 0.0));
    for (std::size_t k = 1; k < 4; ++k) CHECK(grade_norm(t, m, k) == 0.0);
    CHECK_THROWS_AS(grade_norm(t, m, 4), IndexError);
}

TEST_CASE("grade_norm equals brute force over the sup-ball extreme point") {
    auto m = demo_matrix();
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        Vec grid(16);
        for (auto& v : grid) v = rng.uniform();
        OperatorMatrix t(4, grid);
        for (std::size_t k = 1; k < 4; ++k) {
            // oracle: evaluate || |T| x ||_k at x_j = 1/a_{k+1,j}, the extreme
            // point where the supremum is attained for nonnegative matrices
            Vec x(4);
            for (std::size_t j = 1; j <= 4; ++j) x[j - 1] = 1.0 / m.at(k + 1, j);
            const double oracle = hilbert_norm(m, modulus(t).apply(x), k);
            CHECK(grade_norm(t, m, k) == doctest::Approx(oracle).epsilon(1e-13));
        }
    }
}

TEST_CASE("rescale leaves small operators alone") {
    auto m = demo_matrix();
    const OperatorMatrix t = diag_projection(4, 2); // all grade norms < 1/2 already
    RescaleResult rr = rescale_to_contraction(t, m);
    CHECK(rr.scale == 1.0);
    for (std::size_t i = 0; i < 16; ++i) CHECK(rr.op.entries()[i] == t.entries()[i]);
}

TEST_CASE("rescale cuts the worst grade to at most one half") {
    auto m = demo_matrix();
    Rng rng(9);
    for (int trial = 0; trial < 25; ++trial) {
        Vec grid(16);
        for (auto& v : grid) v = 10.0 * rng.uniform();
        OperatorMatrix t(4, grid);
        RescaleResult rr = rescale_to_contraction(t, m);
        double worst = 0.0;
        for (std::size_t k = 1; k < 4; ++k) worst = std::max(worst, grade_norm(rr.op, m, k));
        CHECK(worst <= 0.5);
    }
}

TEST_CASE("rescale rejects the zero operator") {
    auto m = demo_matrix();
    OperatorMatrix t(4, Vec(16, 0.0));
    CHECK_THROWS_AS(rescale_to_contraction(t, m), DegenerateOperatorError);
}

TEST_CASE("condition 5 holds pointwise after rescaling") {
    auto m = demo_matrix();
    Rng rng(53);
    Vec grid(16);
    for (auto& v : grid) v = rng.uniform();
    RescaleResult rr = rescale_to_contraction(OperatorMatrix(4, grid), m);
    const OperatorMatrix at = modulus(rr.op);
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec x = rng.symmetric_vec(4);
        for (std::size_t k = 1; k < 4; ++k)
            CHECK(hilbert_norm(m, at.apply(x), k) <=
                  0.5 * sup_norm(m, x, k + 1) * (1.0 + 1e-12));
    }
}

TEST_CASE("modulus domination in the first Hilbert norm on nonnegative input") {
    auto m = demo_matrix();
    Rng rng(61);
    Vec grid(16);
    for (auto& v : grid) v = rng.symmetric();
    OperatorMatrix t(4, grid);
    const OperatorMatrix at = modulus(t);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec x = rng.uniform_vec(4);
        CHECK(hilbert_norm(m, t.apply(x), 1) <=
              hilbert_norm(m, at.apply(x), 1) * (1.0 + 1e-12));
    }
}

TEST_CASE("dimension mismatch raises") {
    OperatorMatrix t(4, Vec(16, 1.0));
    CHECK_THROWS_AS(t.apply(Vec(3, 0.0)), DimensionError);
}

TEST_CASE("seeded random operator spec is reproducible") {
    Json spec{{"family", "random-nonneg"}, {"density", 0.5}, {"seed", 7}};
    const OperatorMatrix a = operator_from_spec(spec, 6);
    const OperatorMatrix b = operator_from_spec(spec, 6);
    CHECK(a.entries() == b.entries());
    double nonzero = 0;
    for (double v : a.entries()) {
        CHECK(v >= 0.0);
        if (v != 0.0) ++nonzero;
    }
    CHECK(nonzero > 0);
    CHECK(nonzero < 36);
}
