#include <benchmark/benchmark.h>

#include <cmath>

#include "cli.hpp"
#include "mmb/basis.hpp"
#include "mmb/reml.hpp"

namespace {

struct Problem {
    mmb::BasisSpec spec;
    mmb::cli::Dataset data;
};

// Growing domain with fixed knot spacing 0.1 and 10 observations per segment.
Problem make_problem(int m) {
    const int nseg = m - 2;
    Problem p;
    p.spec = mmb::build_spec(0.0, 0.1 * nseg, nseg, 2);
    mmb::cli::SimulateOptions o;
    o.n = static_cast<std::size_t>(10 * nseg);
    o.x_min = p.spec.x_min;
    o.x_max = p.spec.x_max;
    o.seed = 17;
    p.data = mmb::cli::simulate(o);
    return p;
}

void BM_EvalBasis(benchmark::State& state) {
    const auto p = make_problem(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mmb::eval_basis(p.spec, p.data.x));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvalBasis)->RangeMultiplier(2)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_Assemble(benchmark::State& state, mmb::Transform kind) {
    const auto p = make_problem(static_cast<int>(state.range(0)));
    const auto basis = mmb::eval_basis(p.spec, p.data.x);
    for (auto _ : state) benchmark::DoNotOptimize(mmb::assemble(basis, p.data.y, p.spec, kind));
    state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_Assemble, mmb, mmb::Transform::mmb)
    ->RangeMultiplier(2)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_ProfileLoglik(benchmark::State& state, mmb::Transform kind) {
    const auto p = make_problem(static_cast<int>(state.range(0)));
    const auto blocks = mmb::assemble(mmb::eval_basis(p.spec, p.data.x), p.data.y, p.spec, kind);
    for (auto _ : state) benchmark::DoNotOptimize(mmb::profile_loglik(blocks, 1.3).loglik);
    state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_ProfileLoglik, mmb, mmb::Transform::mmb)
    ->RangeMultiplier(2)->Range(256, 16384)->Complexity(benchmark::oN);
BENCHMARK_CAPTURE(BM_ProfileLoglik, cd, mmb::Transform::currie_durban)
    ->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNCubed)->Unit(benchmark::kMillisecond);

void BM_DirectSolve(benchmark::State& state) {
    const auto p = make_problem(static_cast<int>(state.range(0)));
    const auto basis = mmb::eval_basis(p.spec, p.data.x);
    const auto d = mmb::build_D(static_cast<std::size_t>(p.spec.m()));
    for (auto _ : state) benchmark::DoNotOptimize(mmb::direct_pspline_solve(basis, p.data.y, d, 1.3));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DirectSolve)->RangeMultiplier(2)->Range(256, 16384)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
