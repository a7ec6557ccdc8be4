#include <benchmark/benchmark.h>

#include "sislab/dfe.hpp"
#include "sislab/dynamics.hpp"
#include "sislab/equilibria.hpp"
#include "sislab/layer.hpp"
#include "sislab/spectral.hpp"
#include "sislab/suite.hpp"

using namespace sislab;

namespace {

Mesh graded(benchmark::State& state) {
    return build_mesh(1.0, static_cast<int>(state.range(0)), Grading::geometric(0.999));
}

void BM_AssembleOperator(benchmark::State& state) {
    const Mesh m = graded(state);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_operator(m, 0.01, 1.0));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleOperator)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oN);

void BM_SolveDfe(benchmark::State& state) {
    const Mesh m = graded(state);
    const CoefficientSet cs = cs_c(1e-2);
    for (auto _ : state) benchmark::DoNotOptimize(solve_dfe(cs, m));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveDfe)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oN);

void BM_ComputeR0(benchmark::State& state) {
    const Mesh m = graded(state);
    const CoefficientSet cs = cs_c(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(compute_R0(cs, m));
}
BENCHMARK(BM_ComputeR0)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond);

void BM_SolveEndemic(benchmark::State& state) {
    const Mesh m = graded(state);
    const CoefficientSet cs = cs_c(1.0);
    const EquilibriumResult start = solve_ee(cs, m);
    StateField init;
    init.S = start.S;
    init.I = start.I;
    for (double& v : init.I) v *= 1.2;
    for (auto _ : state) benchmark::DoNotOptimize(solve_ee(cs, m, init));
}
BENCHMARK(BM_SolveEndemic)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond);

void BM_SimulateHundredSteps(benchmark::State& state) {
    const Mesh m = graded(state);
    const CoefficientSet cs = cs_c(1.0);
    const StateField init = random_initial_state(1, m);
    SimOptions so;
    so.dt = 0.01;
    so.t_end = 1.0;
    so.output_every = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(init, cs, m, so));
}
BENCHMARK(BM_SimulateHundredSteps)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond);

void BM_RescaleLayer(benchmark::State& state) {
    const Mesh m = graded(state);
    const EquilibriumResult ee = solve_ee(cs_a(), m);
    for (auto _ : state) benchmark::DoNotOptimize(rescale_boundary_layer(ee.S, ee.I, m, 200.0, 3.0));
}
BENCHMARK(BM_RescaleLayer)->Arg(800);

}  // namespace

BENCHMARK_MAIN();
