// SPDX-License-Identifier: Apache-2.0
// Serial reference against the OpenMP path for the frequency sweep and the
// randomized batteries.
#include <benchmark/benchmark.h>

#include "conecert/harness.hpp"
#include "conecert/hinf.hpp"

using namespace conecert;

namespace {

hinf::Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? hinf::Execution::Serial : hinf::Execution::Parallel;
}

void BM_FrequencySweep(benchmark::State& state) {
  harness::InstanceRecipe r;
  r.n = state.range(1);
  r.m = 3;
  r.p = 3;
  const LtiSystem sys = harness::random_monotone_system(r);
  const auto grid = hinf::default_frequency_grid(20000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hinf::frequency_sweep_norm(sys, grid, mode(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_FrequencySweep)
    ->ArgsProduct({{0, 1}, {4, 16, 48}})
    ->Unit(benchmark::kMillisecond);

void BM_BrlBattery(benchmark::State& state) {
  harness::BatteryOptions opt;
  opt.exec = mode(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::run_brl_battery(40, {0.5, 2.0}, opt));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_BrlBattery)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ZeroFrequencyBattery(benchmark::State& state) {
  harness::BatteryOptions opt;
  opt.exec = mode(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::run_zero_frequency_battery(40, opt));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_ZeroFrequencyBattery)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
