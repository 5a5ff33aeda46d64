#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lnsim/graph_state.hpp"
#include "lnsim/ingest.hpp"
#include "lnsim/router.hpp"
#include "lnsim/sampler.hpp"

namespace lnsim {

struct NodeDayStats {
  Millisat routing_income_msat = 0;
  std::int64_t routing_traffic = 0;
  Millisat sender_fee_msat = 0;
  std::int64_t sender_traffic = 0;

  NodeDayStats& operator+=(const NodeDayStats& o) {
    routing_income_msat += o.routing_income_msat;
    routing_traffic += o.routing_traffic;
    sender_fee_msat += o.sender_fee_msat;
    sender_traffic += o.sender_traffic;
    return *this;
  }
  bool is_zero() const {
    return routing_income_msat == 0 && routing_traffic == 0 && sender_fee_msat == 0 && sender_traffic == 0;
  }
  friend bool operator==(const NodeDayStats&, const NodeDayStats&) = default;
};

struct DayOptions {
  bool keep_outcomes = false;
  /// Node mask applied to routing (removed nodes); empty for none.
  std::span<const char> excluded;
};

/// Result of one (snapshot, run) cell.
struct DayResult {
  const SnapshotGraph* graph = nullptr;
  std::size_t snapshot_index = 0;
  int run = 0;
  std::uint64_t cell_seed = 0;
  std::vector<NodeDayStats> node_stats;  // indexed by NodeIndex of `graph`
  std::int64_t successes = 0;
  std::int64_t failures = 0;
  std::map<int, std::int64_t> path_length_histogram;  // hops -> successful payments
  std::vector<PaymentOutcome> outcomes;              // only with keep_outcomes

  std::int64_t attempts() const { return successes + failures; }
  double mean_path_length() const;
};

/// Seed of one (snapshot, run) cell, and the two streams derived from it.
/// Balances and transactions use separate streams so that switching
/// depletion handling or removing nodes never changes the sampled day.
std::uint64_t cell_seed(std::uint64_t master, std::size_t snapshot_index, int run);
BalanceState initial_balances(const SnapshotGraph& graph, std::uint64_t cell_seed, bool ignore_depletion);
/// Empty on a graph with fewer than two nodes.
std::vector<Transaction> day_transactions(const SnapshotGraph& graph, const SimParams& params,
                                          std::uint64_t cell_seed);

/// Routes `transactions` in order on `state`; every success moves balances
/// before the next payment is routed.
DayResult simulate_transactions(const SnapshotGraph& graph, std::span<const Transaction> transactions,
                                BalanceState state, const SimParams& params, const DayOptions& options = {});

/// Fresh balances, sampled transactions, sequential routing. On a graph with
/// fewer than two nodes no transaction can be drawn and all tau count as
/// failures.
DayResult simulate_day(const SnapshotGraph& graph, const SimParams& params, std::uint64_t cell_seed,
                       const DayOptions& options = {});

struct PathLengthStats {
  std::map<int, std::int64_t> histogram;
  std::int64_t successes = 0;
  std::int64_t failures = 0;

  double failure_fraction() const;
  double mean_length() const;
  /// Share of successful payments with exactly `hops` hops.
  double fraction(int hops) const;
};

PathLengthStats path_length_stats(std::span<const PaymentOutcome> outcomes);
PathLengthStats path_length_stats(std::span<const DayResult> cells);

struct NodeMean {
  double routing_income_sat = 0;
  double routing_traffic = 0;
  double sender_fee_sat = 0;
  double sender_traffic = 0;
  int cells = 0;  // cells in which the node (or entity) was present
};

struct ExperimentOptions {
  int workers = 1;
  bool keep_outcomes = false;
  /// Node ids routed around in every cell (entity removal).
  std::set<std::string> removed_nodes;
  const std::atomic<bool>* cancel = nullptr;
};

struct AggregateResult {
  SimParams params;
  std::vector<DayResult> cells;  // ordered by (snapshot, run)
  bool complete = true;          // false when cancelled part way
  std::map<std::string, NodeMean> node_means;
  std::map<std::string, NodeMean> entity_means;
  PathLengthStats paths;

  double failure_fraction() const { return paths.failure_fraction(); }
  double mean_path_length() const { return paths.mean_length(); }
};

/// runs x snapshots independent cells with derived seeds; identical output for
/// any worker count. Merchant labels are taken from the graphs
/// (SnapshotGraph::label_merchants).
AggregateResult run_experiment(std::span<const SnapshotGraph> snapshots, const EntityMap& entities,
                               const SimParams& params, const ExperimentOptions& options = {});

/// Per-entity sums of node statistics.
std::map<std::string, NodeDayStats> aggregate_entities(const std::map<std::string, NodeDayStats>& stats,
                                                       const EntityMap& entities);

/// Node statistics of a cell keyed by node id.
std::map<std::string, NodeDayStats> named_stats(const DayResult& day);

/// Builds a node mask from ids; unknown ids are ignored.
std::vector<char> node_mask(const SnapshotGraph& graph, const std::set<std::string>& ids);

// CSV emitters. Column order is fixed; rows follow cell order then node id.
void write_node_stats_csv(std::ostream& out, const AggregateResult& result);
void write_summary_csv(std::ostream& out, const AggregateResult& result);
void write_node_means_csv(std::ostream& out, const AggregateResult& result);
void write_entity_means_csv(std::ostream& out, const AggregateResult& result);
void write_transactions_csv(std::ostream& out, const AggregateResult& result);

}  // namespace lnsim
