#include "lnsim/sim_engine.hpp"

#include <ostream>

#include "lnsim/csv.hpp"
#include "lnsim/parallel.hpp"

namespace lnsim {

double DayResult::mean_path_length() const {
  if (successes == 0) return 0.0;
  double total = 0;
  for (const auto& [hops, count] : path_length_histogram) total += static_cast<double>(hops) * count;
  return total / static_cast<double>(successes);
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t snapshot_index, int run) {
  return derive_seed(master, {static_cast<std::uint64_t>(run), snapshot_index});
}

BalanceState initial_balances(const SnapshotGraph& graph, std::uint64_t seed, bool ignore_depletion) {
  Rng rng(derive_seed(seed, {0}));
  return init_balances(graph, rng, ignore_depletion);
}

std::vector<Transaction> day_transactions(const SnapshotGraph& graph, const SimParams& params, std::uint64_t seed) {
  if (graph.node_count() < 2) return {};
  Rng rng(derive_seed(seed, {1}));
  return sample_transactions(graph, params, rng);
}

DayResult simulate_transactions(const SnapshotGraph& graph, std::span<const Transaction> transactions,
                                BalanceState state, const SimParams& params, const DayOptions& options) {
  DayResult day;
  day.graph = &graph;
  day.node_stats.assign(graph.node_count(), NodeDayStats{});
  if (options.keep_outcomes) day.outcomes.reserve(transactions.size());

  Router router(graph);
  RouteOptions route_options = RouteOptions::from(params);
  route_options.excluded = options.excluded;
  for (const Transaction& tx : transactions) {
    PaymentOutcome outcome = router.route(state, tx, route_options);
    if (outcome.ok()) {
      state.apply_payment(outcome.edges, tx.amount);
      ++day.successes;
      ++day.path_length_histogram[outcome.hop_count()];
      for (std::size_t i = 0; i < outcome.intermediary_fees.size(); ++i) {
        auto& st = day.node_stats[outcome.path[i + 1]];
        st.routing_income_msat += outcome.intermediary_fees[i];
        ++st.routing_traffic;
      }
      // Charged last hop (sensitivity mode): income without forwarding.
      day.node_stats[tx.recipient].routing_income_msat += outcome.recipient_fee_msat;
      auto& sender = day.node_stats[tx.sender];
      sender.sender_fee_msat += outcome.total_fee_msat;
      ++sender.sender_traffic;
    } else {
      ++day.failures;
    }
    if (options.keep_outcomes) day.outcomes.push_back(std::move(outcome));
  }
  return day;
}

DayResult simulate_day(const SnapshotGraph& graph, const SimParams& params, std::uint64_t seed,
                       const DayOptions& options) {
  params.validate();
  const auto txs = day_transactions(graph, params, seed);
  DayResult day = simulate_transactions(graph, txs, initial_balances(graph, seed, params.ignore_depletion),
                                        params, options);
  day.cell_seed = seed;
  // No sender/recipient pair exists: every payment of the day fails.
  if (graph.node_count() < 2) day.failures = params.tau;
  return day;
}

double PathLengthStats::failure_fraction() const {
  const auto total = successes + failures;
  return total == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(total);
}

double PathLengthStats::mean_length() const {
  if (successes == 0) return 0.0;
  double total = 0;
  for (const auto& [hops, count] : histogram) total += static_cast<double>(hops) * count;
  return total / static_cast<double>(successes);
}

double PathLengthStats::fraction(int hops) const {
  if (successes == 0) return 0.0;
  const auto it = histogram.find(hops);
  return it == histogram.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(successes);
}

PathLengthStats path_length_stats(std::span<const PaymentOutcome> outcomes) {
  PathLengthStats stats;
  for (const auto& o : outcomes) {
    if (o.ok()) {
      ++stats.successes;
      ++stats.histogram[o.hop_count()];
    } else {
      ++stats.failures;
    }
  }
  return stats;
}

PathLengthStats path_length_stats(std::span<const DayResult> cells) {
  PathLengthStats stats;
  for (const auto& day : cells) {
    stats.successes += day.successes;
    stats.failures += day.failures;
    for (const auto& [hops, count] : day.path_length_histogram) stats.histogram[hops] += count;
  }
  return stats;
}

std::vector<char> node_mask(const SnapshotGraph& graph, const std::set<std::string>& ids) {
  std::vector<char> mask(graph.node_count(), 0);
  for (const auto& id : ids) {
    if (const auto n = graph.find_node(id)) mask[*n] = 1;
  }
  return mask;
}

std::map<std::string, NodeDayStats> named_stats(const DayResult& day) {
  std::map<std::string, NodeDayStats> out;
  for (NodeIndex n = 0; n < day.node_stats.size(); ++n) out.emplace(day.graph->node_id(n), day.node_stats[n]);
  return out;
}

std::map<std::string, NodeDayStats> aggregate_entities(const std::map<std::string, NodeDayStats>& stats,
                                                       const EntityMap& entities) {
  std::map<std::string, NodeDayStats> out;
  for (const auto& [node, st] : stats) out[entities.entity_of(node)] += st;
  return out;
}

namespace {

void accumulate(NodeMean& mean, const NodeDayStats& st) {
  mean.routing_income_sat += to_sat(st.routing_income_msat);
  mean.routing_traffic += static_cast<double>(st.routing_traffic);
  mean.sender_fee_sat += to_sat(st.sender_fee_msat);
  mean.sender_traffic += static_cast<double>(st.sender_traffic);
  ++mean.cells;
}

void finish(std::map<std::string, NodeMean>& means) {
  for (auto& [_, m] : means) {
    const double c = m.cells;
    m.routing_income_sat /= c;
    m.routing_traffic /= c;
    m.sender_fee_sat /= c;
    m.sender_traffic /= c;
  }
}

}  // namespace

AggregateResult run_experiment(std::span<const SnapshotGraph> snapshots, const EntityMap& entities,
                               const SimParams& params, const ExperimentOptions& options) {
  params.validate();
  if (snapshots.empty()) throw std::invalid_argument("run_experiment needs at least one snapshot");

  const auto runs = static_cast<std::size_t>(params.runs);
  std::vector<std::vector<char>> masks;
  if (!options.removed_nodes.empty()) {
    for (const auto& g : snapshots) masks.push_back(node_mask(g, options.removed_nodes));
  }

  std::vector<DayResult> cells(snapshots.size() * runs);
  parallel_for(
      cells.size(), options.workers,
      [&](std::size_t i) {
        const std::size_t snap = i / runs;
        const int run = static_cast<int>(i % runs);
        DayOptions day_options;
        day_options.keep_outcomes = options.keep_outcomes;
        if (!masks.empty()) day_options.excluded = masks[snap];
        DayResult day = simulate_day(snapshots[snap], params, cell_seed(params.seed, snap, run), day_options);
        day.snapshot_index = snap;
        day.run = run;
        cells[i] = std::move(day);
      },
      options.cancel);

  AggregateResult result;
  result.params = params;
  for (auto& cell : cells) {
    if (cell.graph == nullptr) {
      result.complete = false;
      continue;
    }
    result.cells.push_back(std::move(cell));
  }

  for (const DayResult& day : result.cells) {
    std::map<std::string, NodeDayStats> entity_day;
    for (NodeIndex n = 0; n < day.node_stats.size(); ++n) {
      const std::string& id = day.graph->node_id(n);
      accumulate(result.node_means[id], day.node_stats[n]);
      entity_day[entities.entity_of(id)] += day.node_stats[n];
    }
    for (const auto& [entity, st] : entity_day) accumulate(result.entity_means[entity], st);
  }
  finish(result.node_means);
  finish(result.entity_means);
  result.paths = path_length_stats(std::span<const DayResult>(result.cells));
  return result;
}

void write_node_stats_csv(std::ostream& out, const AggregateResult& result) {
  out << "snapshot_id,run,node,routing_income_sat,routing_traffic,sender_fee_sat,sender_traffic\n";
  for (const DayResult& day : result.cells) {
    for (NodeIndex n = 0; n < day.node_stats.size(); ++n) {
      const auto& st = day.node_stats[n];
      if (st.is_zero()) continue;
      csv::write_row(out, {day.graph->snapshot_id(), std::to_string(day.run), day.graph->node_id(n),
                           csv::format_sat(st.routing_income_msat), std::to_string(st.routing_traffic),
                           csv::format_sat(st.sender_fee_msat), std::to_string(st.sender_traffic)});
    }
  }
}

void write_summary_csv(std::ostream& out, const AggregateResult& result) {
  out << "snapshot_id,run,failures,success,mean_path_length\n";
  for (const DayResult& day : result.cells) {
    csv::write_row(out, {day.graph->snapshot_id(), std::to_string(day.run), std::to_string(day.failures),
                         std::to_string(day.successes), csv::format_fixed(day.mean_path_length(), 4)});
  }
}

namespace {

void write_means(std::ostream& out, const char* key, const std::map<std::string, NodeMean>& means) {
  out << key << ",routing_income_sat,routing_traffic,sender_fee_sat,sender_traffic,cells\n";
  for (const auto& [id, m] : means) {
    csv::write_row(out, {id, csv::format_fixed(m.routing_income_sat, 1), csv::format_fixed(m.routing_traffic, 3),
                         csv::format_fixed(m.sender_fee_sat, 1), csv::format_fixed(m.sender_traffic, 3),
                         std::to_string(m.cells)});
  }
}

}  // namespace

void write_node_means_csv(std::ostream& out, const AggregateResult& result) {
  write_means(out, "node", result.node_means);
}

void write_entity_means_csv(std::ostream& out, const AggregateResult& result) {
  write_means(out, "entity", result.entity_means);
}

void write_transactions_csv(std::ostream& out, const AggregateResult& result) {
  out << "run,snapshot_id,tx_index,sender,recipient,amount_sat\n";
  for (const DayResult& day : result.cells) {
    const auto txs = day_transactions(*day.graph, result.params, day.cell_seed);
    for (std::size_t i = 0; i < txs.size(); ++i) {
      csv::write_row(out, {std::to_string(day.run), day.graph->snapshot_id(), std::to_string(i),
                           day.graph->node_id(txs[i].sender), day.graph->node_id(txs[i].recipient),
                           std::to_string(txs[i].amount)});
    }
  }
}

}  // namespace lnsim
