#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "klab/basis.hpp"
#include "klab/pipeline.hpp"

using namespace klab;

namespace {

KoetheMatrix demo_matrix() {
    Json spec{{"family", "geometric"}, {"base", 4.0}, {"exponents", {0.0, 1.0, 3.0, 7.0}}, {"N", 4}};
    KoetheMatrix m = matrix_from_spec(spec);
    verify_conditions(m);
    return m;
}

OperatorMatrix projection_12(const KoetheMatrix& m) {
    Json spec{{"family", "coordinate-projection"}, {"coords", {1, 2}}};
    return rescale_to_contraction(operator_from_spec(spec, m.dim()), m).op;
}

OperatorMatrix random_rescaled(const KoetheMatrix& m, std::uint64_t seed, double density = 1.0) {
    Json spec{{"family", "random-nonneg"}, {"density", density}, {"seed", seed}};
    return rescale_to_contraction(operator_from_spec(spec, m.dim()), m).op;
}

} // namespace

TEST_CASE("range of a coordinate projection") {
    auto m = demo_matrix();
    const OperatorMatrix t = projection_12(m);
    const RangeSubspace sub = range_basis(t, m, 1e-10);
    CHECK(sub.d == 2);
    // span must consist of multiples of e_1, e_2
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(sub.span(2, j) == 0.0);
        CHECK(sub.span(3, j) == 0.0);
    }
}

TEST_CASE("rank one outer product") {
    auto m = demo_matrix();
    Rng rng(4);
    const Vec u = rng.uniform_vec(4);
    const Vec v = rng.uniform_vec(4);
    Vec grid(16);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) grid[i * 4 + j] = u[i] * v[j];
    const OperatorMatrix t = rescale_to_contraction(OperatorMatrix(4, grid), m).op;
    CHECK(range_basis(t, m, 1e-10).d == 1);
}

TEST_CASE("duplicated column drops the rank by one") {
    auto m = demo_matrix();
    Rng rng(19);
    Vec grid(16);
    for (auto& g : grid) g = rng.uniform();
    for (std::size_t i = 0; i < 4; ++i) grid[i * 4 + 3] = grid[i * 4 + 2]; // col 4 := col 3
    const OperatorMatrix t = rescale_to_contraction(OperatorMatrix(4, grid), m).op;
    CHECK(range_basis(t, m, 1e-10).d == 3);
}

TEST_CASE("zero operator has empty range") {
    auto m = demo_matrix();
    OperatorMatrix t(4, Vec(16, 0.0));
    CHECK_THROWS_AS(range_basis(t, m, 1e-10), EmptyRangeError);
}

TEST_CASE("diagonal projection basis matches the closed form") {
    auto m = demo_matrix();
    const DeadEndData dd = build_deadend(m);
    const OperatorMatrix t = projection_12(m);
    const BasisExpansion e = extract_basis(range_basis(t, m, 1e-10), m, dd, 1e-10);
    REQUIRE(e.d == 2);
    // eigenvalues are a_{inf,n}^2 / a_{1,n}^2 for n = 1,2; a_inf increases in n
    const double lam_hi = dd.a_inf[1] * dd.a_inf[1];
    const double lam_lo = dd.a_inf[0] * dd.a_inf[0];
    CHECK(e.lambda[0] == doctest::Approx(lam_hi).epsilon(1e-12));
    CHECK(e.lambda[1] == doctest::Approx(lam_lo).epsilon(1e-12));
    // f_1 is e_2 up to sign (a_{1,n} = 1 so H_1 normalization is euclidean)
    CHECK(std::abs(e.f(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.f(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one-dimensional extraction") {
    auto m = demo_matrix();
    const DeadEndData dd = build_deadend(m);
    Json spec{{"family", "coordinate-projection"}, {"coords", {3}}};
    const OperatorMatrix t =
        rescale_to_contraction(operator_from_spec(spec, 4), m).op;
    const BasisExpansion e = extract_basis(range_basis(t, m, 1e-10), m, dd, 1e-10);
    REQUIRE(e.d == 1);
    const Vec f1 = e.vector(1);
    CHECK(hilbert_norm(m, f1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.lambda[0] == doctest::Approx(inf_inner(dd, f1, f1)).epsilon(1e-12));
}

TEST_CASE("simultaneous diagonalization residuals on random operators") {
    auto m = demo_matrix();
    const DeadEndData dd = build_deadend(m);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const OperatorMatrix t = random_rescaled(m, seed);
        const BasisExpansion e = extract_basis(range_basis(t, m, 1e-10), m, dd, 1e-10);
        CHECK(e.orth_residual <= 1e-9);
        CHECK(std::is_sorted(e.lambda.rbegin(), e.lambda.rend()));
        for (double lam : e.lambda) CHECK(lam > 0.0);
        // every f_j stays inside range(T)
        for (std::size_t j = 1; j <= e.d; ++j)
            CHECK(range_residual(m, e, e.vector(j)) <= 1e-9);
    }
}

TEST_CASE("expand/reconstruct on range vectors") {
    auto m = demo_matrix();
    const DeadEndData dd = build_deadend(m);
    const OperatorMatrix t = random_rescaled(m, 5);
    const BasisExpansion e = extract_basis(range_basis(t, m, 1e-10), m, dd, 1e-10);
    Rng rng(91);

    const Vec zero(4, 0.0);
    for (double c : expand(m, e, zero)) CHECK(c == 0.0);

    for (int trial = 0; trial < 1000; ++trial) {
        const Vec tx = t.apply(rng.symmetric_vec(4));
        const Vec coeff = expand(m, e, tx);
        const Vec back = reconstruct(e, coeff);
        const double nrm = hilbert_norm(m, tx, 1);
        if (nrm > 0.0)
            CHECK(hilbert_norm(m, axpy(-1.0, back, tx), 1) / nrm <= 1e-9);
        // coefficient j is the H_1 inner product with f_j
        for (std::size_t j = 1; j <= e.d; ++j)
            CHECK(coeff[j - 1] == doctest::Approx(grade_inner(m, tx, e.vector(j), 1)));
    }
}

TEST_CASE("diagonal case: expansion of e_1 has a single nonzero coefficient") {
    auto m = demo_matrix();
    const DeadEndData dd = build_deadend(m);
    const OperatorMatrix t = projection_12(m);
    const BasisExpansion e = extract_basis(range_basis(t, m, 1e-10), m, dd, 1e-10);
    Vec e1(4, 0.0);
    e1[0] = 1.0;
    const Vec coeff = expand(m, e, t.apply(e1));
    int nonzero = 0;
    for (double c : coeff)
        if (std::abs(c) > 1e-12) ++nonzero;
    CHECK(nonzero == 1);
}

TEST_CASE("vectors outside the range report a residual") {
    auto m = demo_matrix();
    const DeadEndData dd = build_deadend(m);
    const OperatorMatrix t = projection_12(m);
    const BasisExpansion e = extract_basis(range_basis(t, m, 1e-10), m, dd, 1e-10);
    Vec outside(4, 0.0);
    outside[3] = 1.0;
    CHECK(range_residual(m, e, outside) > 1e-10);
}

TEST_CASE("projected operators: endpoints and contraction") {
    auto m = demo_matrix();
    const DeadEndData dd = build_deadend(m);
    const OperatorMatrix t = random_rescaled(m, 23);
    const BasisExpansion e = extract_basis(range_basis(t, m, 1e-10), m, dd, 1e-10);
    Rng rng(7);
    const Vec x = rng.symmetric_vec(4);

    // n = 0 gives the zero operator
    for (double v : apply_projected(m, t, e, 0, x)) CHECK(v == 0.0);
    // n = d reproduces T
    const Vec full = apply_projected(m, t, e, e.d, x);
    const Vec tx = t.apply(x);
    for (std::size_t i = 0; i < 4; ++i) CHECK(full[i] == doctest::Approx(tx[i]).epsilon(1e-10));
    CHECK_THROWS_AS(apply_projected(m, t, e, e.d + 1, x), IndexError);

    ContractionReport rep = verify_contractions(m, t, dd, e, rng, 1000);
    CHECK(rep.pass);
    CHECK(rep.worst_h1_ratio <= 1.0 + 1e-12);
    CHECK(rep.worst_inf_ratio <= 1.0 + 1e-12);
    CHECK(rep.monotone);
}

TEST_CASE("positive-cone domination ||T_n x||_1 <= || |T| x ||_1") {
    auto m = demo_matrix();
    const DeadEndData dd = build_deadend(m);
    Rng rng(131);
    for (std::uint64_t seed = 30; seed < 40; ++seed) {
        const OperatorMatrix t = random_rescaled(m, seed, 0.6);
        const BasisExpansion e = extract_basis(range_basis(t, m, 1e-10), m, dd, 1e-10);
        const OperatorMatrix at = modulus(t);
        for (int trial = 0; trial < 100; ++trial) {
            const Vec x = rng.uniform_vec(4);
            const double bound = hilbert_norm(m, at.apply(x), 1);
            for (std::size_t n = 0; n <= e.d; ++n)
                CHECK(hilbert_norm(m, apply_projected(m, t, e, n, x), 1) <=
                      bound * (1.0 + 1e-10));
        }
    }
}
