#include <doctest.h>

#include <cmath>

#include "klab/koethe.hpp"
#include "klab/pipeline.hpp"

using namespace klab;

namespace {

KoetheMatrix demo_matrix() {
    // a_{k,n} = 4^{e_k n}, e = (0,1,3,7), N = 4
    Json spec{{"family", "geometric"}, {"base", 4.0}, {"exponents", {0.0, 1.0, 3.0, 7.0}}, {"N", 4}};
    return matrix_from_spec(spec);
}

KoetheMatrix power_matrix(std::size_t K, std::size_t N) {
    Vec grid;
    for (std::size_t k = 1; k <= K; ++k)
        for (std::size_t n = 1; n <= N; ++n)
            grid.push_back(std::pow(static_cast<double>(n), static_cast<double>(k - 1)));
    return KoetheMatrix(K, N, std::move(grid));
}

} // namespace

TEST_CASE("all-ones matrix fails only condition 3") {
    KoetheMatrix m(2, 4, Vec(8, 1.0));
    const ConditionReport rep = verify_conditions(m);
    CHECK(rep.condition[0].pass);
    CHECK(rep.condition[1].pass);
    CHECK_FALSE(rep.condition[2].pass);
    CHECK(rep.condition[2].margin == doctest::Approx(1.0 - 4.0)); // sum = 4
    CHECK(rep.condition[3].pass);
    CHECK_FALSE(rep.all_pass);
    CHECK_FALSE(m.normalized());
}

TEST_CASE("demo matrix passes all four conditions with the expected sums") {
    KoetheMatrix m = demo_matrix();
    const ConditionReport rep = verify_conditions(m);
    CHECK(rep.all_pass);
    CHECK(m.normalized());

    // independent oracle: direct summation of the condition-3 rows
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        s1 += m.at(1, n) / m.at(2, n);
        s2 += m.at(2, n) / m.at(3, n);
        s3 += m.at(3, n) / m.at(4, n);
    }
    CHECK(s1 == doctest::Approx(85.0 / 256.0).epsilon(1e-15));
    CHECK(s2 < 1.0 / 15.0);
    CHECK(s3 < 1.0 / 255.0);
}

TEST_CASE("single-grade matrix: conditions 2-4 vacuous") {
    KoetheMatrix m(1, 5, Vec(5, 1.0));
    const ConditionReport rep = verify_conditions(m);
    CHECK(rep.condition[0].pass);
    CHECK_FALSE(rep.condition[1].applicable);
    CHECK_FALSE(rep.condition[2].applicable);
    CHECK_FALSE(rep.condition[3].applicable);
    CHECK(rep.all_pass);
}

TEST_CASE("invalid entries are rejected") {
    CHECK_THROWS_AS(
        [] {
            KoetheMatrix m(1, 2, Vec{1.0, -1.0});
            verify_conditions(m);
        }(),
        InvalidMatrixError);
    CHECK_THROWS_AS(
        [] {
            KoetheMatrix m(1, 2, Vec{1.0, 1e200}); // square overflows
            verify_conditions(m);
        }(),
        InvalidMatrixError);
}

TEST_CASE("normalized consequence: entries >= 1 and grade-monotone") {
    KoetheMatrix m = demo_matrix();
    verify_conditions(m);
    REQUIRE(m.normalized());
    for (std::size_t k = 1; k <= m.grades(); ++k)
        for (std::size_t n = 1; n <= m.dim(); ++n) {
            CHECK(m.at(k, n) >= 1.0);
            if (k < m.grades()) CHECK(m.at(k, n) <= m.at(k + 1, n));
        }
}

TEST_CASE("normalize turns the power family into a passing matrix") {
    const KoetheMatrix raw = power_matrix(9, 8);
    NormalizeResult nr = normalize(raw);
    CHECK(nr.matrix.grades() >= 3);
    ConditionReport rep = verify_conditions(nr.matrix);
    CHECK(rep.all_pass);
    CHECK(nr.log.selected.front() == 1);
    CHECK(nr.log.scalars.front() == 1.0);
}

TEST_CASE("normalize is a fixed point on the demo matrix") {
    KoetheMatrix m = demo_matrix();
    verify_conditions(m);
    NormalizeResult nr = normalize(m);
    CHECK(nr.matrix.grades() == m.grades());
    for (double c : nr.log.scalars) CHECK(c == 1.0);
    for (std::size_t k = 1; k <= m.grades(); ++k)
        for (std::size_t n = 1; n <= m.dim(); ++n)
            CHECK(nr.matrix.at(k, n) == m.at(k, n));
}

TEST_CASE("normalize rejects irregular ratio columns") {
    // ratio a_1/a_2 increases in n
    KoetheMatrix raw(2, 2, Vec{1.0, 1.0, 4.0, 2.0});
    CHECK_THROWS_AS(normalize(raw), NotRegularError);
}

TEST_CASE("norm evaluations on unit, constant and zero vectors") {
    KoetheMatrix m = demo_matrix();
    verify_conditions(m);
    Vec e1(4, 0.0);
    e1[0] = 1.0;
    for (std::size_t k = 1; k <= 4; ++k) {
        CHECK(sup_norm(m, e1, k) == m.at(k, 1));
        CHECK(hilbert_norm(m, e1, k) == doctest::Approx(m.at(k, 1)));
    }
    const Vec ones(4, 1.0);
    CHECK(sup_norm(m, ones, 2) == doctest::Approx(256.0)); // 4^4
    const double expected =
        std::sqrt(std::pow(4.0, 2) + std::pow(4.0, 4) + std::pow(4.0, 6) + std::pow(4.0, 8));
    CHECK(hilbert_norm(m, ones, 2) == doctest::Approx(expected).epsilon(1e-15));
    const Vec zero(4, 0.0);
    CHECK(sup_norm(m, zero, 1) == 0.0);
    CHECK(hilbert_norm(m, zero, 1) == 0.0);
    CHECK_THROWS_AS(sup_norm(m, ones, 5), IndexError);
    CHECK_THROWS_AS(hilbert_norm(m, ones, 0), IndexError);
}

TEST_CASE("norm sandwich and grade monotonicity on random vectors") {
    KoetheMatrix m = demo_matrix();
    verify_conditions(m);
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const Vec x = rng.symmetric_vec(4);
        for (std::size_t k = 1; k <= 4; ++k) {
            CHECK(sup_norm(m, x, k) <= hilbert_norm(m, x, k) * (1.0 + 1e-15));
            if (k < 4) {
                CHECK(hilbert_norm(m, x, k) <= sup_norm(m, x, k + 1) * (1.0 + 1e-15));
                CHECK(sup_norm(m, x, k) <= sup_norm(m, x, k + 1));
                CHECK(hilbert_norm(m, x, k) <= hilbert_norm(m, x, k + 1));
            }
        }
    }
}

TEST_CASE("norm homogeneity and triangle inequality") {
    KoetheMatrix m = demo_matrix();
    verify_conditions(m);
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec x = rng.symmetric_vec(4);
        const Vec y = rng.symmetric_vec(4);
        const double alpha = 4.0 * rng.symmetric();
        Vec ax(4), xy(4);
        for (std::size_t i = 0; i < 4; ++i) {
            ax[i] = alpha * x[i];
            xy[i] = x[i] + y[i];
        }
        for (std::size_t k = 1; k <= 4; ++k) {
            CHECK(sup_norm(m, ax, k) == doctest::Approx(std::abs(alpha) * sup_norm(m, x, k)));
            CHECK(hilbert_norm(m, ax, k) ==
                  doctest::Approx(std::abs(alpha) * hilbert_norm(m, x, k)));
            CHECK(sup_norm(m, xy, k) <= sup_norm(m, x, k) + sup_norm(m, y, k) + 1e-12);
            CHECK(hilbert_norm(m, xy, k) <= hilbert_norm(m, x, k) + hilbert_norm(m, y, k) + 1e-12);
        }
    }
}

TEST_CASE("normalize output always passes verify_conditions") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        // random grade-monotone regular grid: cumulative products of
        // nonincreasing-ratio rows
        const std::size_t K = 4, N = 5;
        Vec grid(K * N);
        for (std::size_t n = 0; n < N; ++n) grid[n] = 1.0 + rng.uniform();
        for (std::size_t k = 1; k < K; ++k) {
            // ratio row: increasing factors in n keep a_k/a_{k+1} nonincreasing
            double factor = 1.5 + rng.uniform();
            for (std::size_t n = 0; n < N; ++n) {
                factor += rng.uniform();
                grid[k * N + n] = grid[(k - 1) * N + n] * factor;
            }
        }
        NormalizeResult nr = normalize(KoetheMatrix(K, N, grid));
        CHECK(verify_conditions(nr.matrix).all_pass);
    }
}
