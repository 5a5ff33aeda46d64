#include <benchmark/benchmark.h>

#include <vector>

#include "lnsim/netstats/correlation.hpp"
#include "lnsim/netstats/structure.hpp"
#include "lnsim/rng.hpp"

namespace {

using namespace lnsim;

std::vector<double> tied_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.uniform_below(n / 4 + 1));
  return v;
}

void BM_Spearman(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = tied_values(n, 1), y = tied_values(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(netstats::spearman(x, y).value);
}
BENCHMARK(BM_Spearman)->Range(1 << 10, 1 << 16);

void BM_Kendall(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = tied_values(n, 1), y = tied_values(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(netstats::kendall(x, y).value);
}
BENCHMARK(BM_Kendall)->Range(1 << 10, 1 << 16);

void BM_WeightedKendall(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = tied_values(n, 1), y = tied_values(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(netstats::weighted_kendall(x, y).value);
}
BENCHMARK(BM_WeightedKendall)->Range(1 << 10, 1 << 16);

void BM_Betweenness(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = netstats::barabasi_albert(n, 3, 9);
  for (auto _ : state) benchmark::DoNotOptimize(netstats::betweenness(g, static_cast<int>(state.range(1))).data());
}
BENCHMARK(BM_Betweenness)->Args({2000, 1})->Args({2000, 4})->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_EffectiveDiameter(benchmark::State& state) {
  const auto g = netstats::barabasi_albert(static_cast<std::size_t>(state.range(0)), 3, 9);
  for (auto _ : state) benchmark::DoNotOptimize(netstats::effective_diameter(g));
}
BENCHMARK(BM_EffectiveDiameter)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
