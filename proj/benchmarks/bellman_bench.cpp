#include <benchmark/benchmark.h>

#include "qladder/bellman.hpp"

namespace {

const qladder::EconomicParams kParams(0.5, 1.05, 0.9, 2.0);

void BM_LeapfrogOnly(benchmark::State& state) {
  const auto m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qladder::solve_leapfrog_only(kParams, m, 0));
}
BENCHMARK(BM_LeapfrogOnly)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_CoupledImitation(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(qladder::solve_leapfrog_imitation(kParams, 40, 0, 0.3));
}
BENCHMARK(BM_CoupledImitation)->Unit(benchmark::kMillisecond);

}  // namespace
