// Serial reference vs OpenMP kernels. Replication and grid-point counts are
// fixed so the two variants do identical work.

#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "hti/experiment.hpp"

using namespace hti;

namespace {

ExperimentPlan mc_plan(long replications) {
    ExperimentPlan p;
    p.base = fixture::example1(0.65);
    p.x0 = StateMatrix::Zero(p.base.agents(), p.base.dim());
    p.replications = replications;
    p.horizon = 2000;
    p.stride = 100;
    p.seed = 11;
    return p;
}

void BM_MonteCarloSerial(benchmark::State& state) {
    const auto plan = mc_plan(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_runs_serial(plan));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarloParallel(benchmark::State& state) {
    const auto plan = mc_plan(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_runs(plan, 0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepBSerial(benchmark::State& state) {
    const auto grid = log_grid(0.05, 20.0, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sweep_B_serial(grid, Example1Params{}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepBParallel(benchmark::State& state) {
    const auto grid = log_grid(0.05, 20.0, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sweep_B(grid, Example1Params{}, 0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepBSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepBParallel)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
