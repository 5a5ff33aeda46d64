#include <benchmark/benchmark.h>

#include <spdlog/spdlog.h>

#include "lnsim/competition.hpp"
#include "lnsim/sim_engine.hpp"
#include "testkit.hpp"

namespace {

using namespace lnsim;

// One simulated day at the default transaction count.
void BM_SimulateDay(benchmark::State& state) {
  spdlog::set_level(spdlog::level::err);
  const auto g = testkit::ln_like_graph(5, static_cast<int>(state.range(0)), 20);
  SimParams p;
  std::uint64_t run = 0;
  for (auto _ : state) {
    const DayResult d = simulate_day(g, p, cell_seed(p.seed, 0, static_cast<int>(run++)));
    benchmark::DoNotOptimize(d.successes);
  }
  state.SetItemsProcessed(state.iterations() * p.tau);
}
BENCHMARK(BM_SimulateDay)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

// A full experiment (snapshots x runs) by worker count.
void BM_RunExperiment(benchmark::State& state) {
  spdlog::set_level(spdlog::level::err);
  const auto graphs = testkit::ln_like_snapshots(6, 4, 1000, 20);
  SimParams p;
  p.runs = 4;
  ExperimentOptions o;
  o.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(graphs, {}, p, o).paths.successes);
  state.SetItemsProcessed(state.iterations() * p.tau * p.runs * 4);
}
BENCHMARK(BM_RunExperiment)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

// Rerouting the traffic of the busiest node of one day.
void BM_RemovalImpact(benchmark::State& state) {
  spdlog::set_level(spdlog::level::err);
  const auto g = testkit::ln_like_graph(7, 1000, 20);
  SimParams p;
  DayOptions keep;
  keep.keep_outcomes = true;
  const DayResult day = simulate_day(g, p, cell_seed(p.seed, 0, 0), keep);
  NodeIndex busiest = 0;
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (day.node_stats[v].routing_traffic > day.node_stats[busiest].routing_traffic) busiest = v;
  }
  const std::vector<NodeIndex> removed{busiest};
  const auto reference = state.range(0) == 0 ? DeltaReference::kInitialBalances : DeltaReference::kPrePaymentBalances;
  for (auto _ : state) benchmark::DoNotOptimize(removal_impact(g, day, removed, p, reference).phi_x);
}
BENCHMARK(BM_RemovalImpact)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
