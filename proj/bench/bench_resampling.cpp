// Serial reference vs OpenMP kernels for bootstrap and permutation resampling.

#include "psd/stats.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using psd::SampleSet;

SampleSet<double> normal_sample(std::size_t n, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(shift, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return SampleSet<double>::from_values(v);
}

void BM_BootstrapSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = normal_sample(n, 0.0, 1), y = normal_sample(n, 0.3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(psd::bootstrap_replicates_serial(x, y, 500, 7));
}

void BM_BootstrapParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = normal_sample(n, 0.0, 1), y = normal_sample(n, 0.3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(psd::bootstrap_replicates(x, y, 500, 7));
}

void BM_PermutationSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = normal_sample(n, 0.0, 1), y = normal_sample(n, 0.3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(psd::dominance_test_permutation_serial(x, y, 500, 7));
}

void BM_PermutationParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = normal_sample(n, 0.0, 1), y = normal_sample(n, 0.3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(psd::dominance_test_permutation(x, y, 500, 7));
}

}  // namespace

BENCHMARK(BM_BootstrapSerial)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapParallel)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PermutationSerial)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PermutationParallel)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
