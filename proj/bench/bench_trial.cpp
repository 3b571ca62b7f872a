// Serial reference vs OpenMP run_trial on the default noise-sweep scenario.

#include <benchmark/benchmark.h>

#include "rssiloc/experiments.hpp"

namespace {

using namespace rssiloc;

TrialPlan make_plan(std::size_t repetitions) {
    const ScenarioSpec spec = default_scenario(Experiment::NoiseSweep);
    return {initial_world(spec), repetitions, spec.motion};
}

void BM_RunTrialSerial(benchmark::State& state) {
    const WorldConfig config = default_scenario(Experiment::NoiseSweep).world;
    const TrialPlan plan = make_plan(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trial_serial(config, plan));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RunTrialOpenMP(benchmark::State& state) {
    const WorldConfig config = default_scenario(Experiment::NoiseSweep).world;
    const TrialPlan plan = make_plan(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trial(config, plan));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_RunTrialSerial)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunTrialOpenMP)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
