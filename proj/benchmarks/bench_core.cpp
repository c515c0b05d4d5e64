#include <benchmark/benchmark.h>

#include "klab/basis.hpp"
#include "klab/cone.hpp"
#include "klab/pipeline.hpp"

namespace {

klab::KoetheMatrix demo_matrix(std::size_t N) {
    klab::Json spec{{"family", "geometric"},
                    {"base", 2.0},
                    {"exponents", {0.0, 1.0, 3.0, 7.0, 15.0}},
                    {"N", N}};
    return klab::matrix_from_spec(spec);
}

void bm_grade_norm(benchmark::State& state) {
    auto m = demo_matrix(static_cast<std::size_t>(state.range(0)));
    klab::verify_conditions(m);
    klab::Rng rng(7);
    klab::OperatorMatrix t(m.dim(), rng.uniform_vec(m.dim() * m.dim()));
    for (auto _ : state) benchmark::DoNotOptimize(klab::grade_norm(t, m, 1));
}
BENCHMARK(bm_grade_norm)->Arg(16)->Arg(32);

void bm_extract_basis(benchmark::State& state) {
    auto m = demo_matrix(static_cast<std::size_t>(state.range(0)));
    klab::verify_conditions(m);
    klab::Rng rng(7);
    klab::OperatorMatrix raw(m.dim(), rng.uniform_vec(m.dim() * m.dim()));
    auto t = klab::rescale_to_contraction(raw, m).op;
    auto dd = klab::build_deadend(m);
    auto sub = klab::range_basis(t, m, 1e-10);
    for (auto _ : state) benchmark::DoNotOptimize(klab::extract_basis(sub, m, dd, 1e-10));
}
BENCHMARK(bm_extract_basis)->Arg(16)->Arg(32);

void bm_build_cone_context(benchmark::State& state) {
    auto m = demo_matrix(static_cast<std::size_t>(state.range(0)));
    klab::verify_conditions(m);
    klab::Rng rng(7);
    klab::OperatorMatrix raw(m.dim(), rng.uniform_vec(m.dim() * m.dim()));
    auto t = klab::rescale_to_contraction(raw, m).op;
    auto dd = klab::build_deadend(m);
    for (auto _ : state)
        benchmark::DoNotOptimize(klab::build_context(m, dd, t, 1, m.dim()));
}
BENCHMARK(bm_build_cone_context)->Arg(16)->Arg(32);

} // namespace

BENCHMARK_MAIN();
