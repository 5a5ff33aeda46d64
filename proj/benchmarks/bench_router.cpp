#include <benchmark/benchmark.h>

#include "lnsim/privacy.hpp"
#include "lnsim/router.hpp"
#include "lnsim/rng.hpp"
#include "testkit.hpp"

namespace {

using namespace lnsim;

// Cheapest-path queries between random pairs on an LN-like graph.
void BM_Route(benchmark::State& state) {
  const auto g = testkit::ln_like_graph(1, static_cast<int>(state.range(0)), 10);
  Rng rng(2);
  const BalanceState balances = init_balances(g, rng);
  Router router(g);
  std::int64_t found = 0;
  for (auto _ : state) {
    const auto s = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
    const auto t = static_cast<NodeIndex>((s + 1 + rng.uniform_below(g.node_count() - 1)) % g.node_count());
    const auto o = router.route(balances, s, t, 60'000, {});
    found += o.ok();
    benchmark::DoNotOptimize(o.total_fee_msat);
  }
  state.counters["nodes"] = static_cast<double>(g.node_count());
  state.counters["success"] = benchmark::Counter(static_cast<double>(found), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_Route)->Arg(500)->Arg(2000)->Arg(8000);

// Same queries with the hop limit low enough to force the bounded search.
void BM_RouteHopLimited(benchmark::State& state) {
  const auto g = testkit::ln_like_graph(1, 2000, 10);
  Rng rng(2);
  const BalanceState balances = init_balances(g, rng);
  Router router(g);
  RouteOptions o;
  o.max_hops = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto s = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
    const auto t = static_cast<NodeIndex>((s + 1 + rng.uniform_below(g.node_count() - 1)) % g.node_count());
    benchmark::DoNotOptimize(router.route(balances, s, t, 60'000, o).total_fee_msat);
  }
}
BENCHMARK(BM_RouteHopLimited)->Arg(3)->Arg(6);

// Fixed-length search at default GA settings.
void BM_LengthenedPath(benchmark::State& state) {
  const auto g = testkit::ln_like_graph(3, 300, 5);
  Rng rng(4);
  const BalanceState balances = init_balances(g, rng);
  Router router(g);
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  while (pairs.size() < 32) {
    const auto s = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
    const auto t = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
    if (s != t && router.route(balances, s, t, 20'000, {}).ok()) pairs.emplace_back(s, t);
  }
  GAParams ga;
  ga.target_length = static_cast<int>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto [s, t] = pairs[i++ % pairs.size()];
    ga.seed = i;
    benchmark::DoNotOptimize(lengthened_path(g, balances, s, t, 20'000, ga).total_fee_msat);
  }
}
BENCHMARK(BM_LengthenedPath)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
