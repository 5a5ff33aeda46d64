#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "lnsim/sim_engine.hpp"

namespace lnsim {

/// Share of successful payments with exactly one intermediary (two hops),
/// over all successes and over routed successes (two hops or more).
struct SingleHopFraction {
  std::optional<double> of_all;
  std::optional<double> of_routed;
};

SingleHopFraction single_hop_fraction(std::span<const PaymentOutcome> outcomes);
SingleHopFraction single_hop_fraction(const PathLengthStats& stats);

struct PlausibilityCurve {
  Satoshi amount = 0;
  /// (threshold d, share of nodes with more than d channels of capacity >= amount)
  std::vector<std::pair<int, double>> points;
};

/// Throws std::invalid_argument unless thresholds are ascending.
PlausibilityCurve plausibility_curve(const SnapshotGraph& graph, Satoshi amount, std::span<const int> thresholds);

struct GAParams {
  int target_length = 1;        // L, in hops
  int population_size = 50;
  int generations = 100;
  int tournament_size = 3;
  int elite_count = 1;
  Millisat length_penalty = 1'000'000'000;  // per hop of deviation from L
  std::uint64_t seed = 0;

  void validate() const;
};

/// Searches for the cheapest simple path with exactly L hops that can carry
/// the amount on `state`, starting from mutated copies of the cheapest path.
/// Returns a failed outcome when the cheapest path does not exist or no
/// exact-length path turned up within the generation budget.
PaymentOutcome lengthened_path(const SnapshotGraph& graph, const BalanceState& state, NodeIndex sender,
                               NodeIndex recipient, Satoshi amount, const GAParams& ga,
                               const RouteOptions& options = {});

struct LengthCost {
  int length = 0;  // 0 stands for the unconstrained cheapest path
  std::int64_t attempts = 0;
  std::int64_t successes = 0;
  double mean_cost_sat = 0;
  double median_cost_sat = 0;

  double success_rate() const {
    return attempts == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(attempts);
  }
};

struct CostVsLengthOptions {
  std::vector<int> lengths = {1, 2, 3, 4, 5, 6};
  /// Successful baseline payments examined per cell, evenly spaced over the day.
  int samples_per_cell = 20;
  GAParams ga;  // target_length and seed are set per payment
  int workers = 1;
  const std::atomic<bool>* cancel = nullptr;
};

/// Replays every (snapshot, run) cell; for sampled successful payments the
/// fixed-length search runs on the balances right before the payment. The
/// first entry is the unconstrained baseline (length 0).
std::vector<LengthCost> cost_vs_length(std::span<const SnapshotGraph> snapshots, const SimParams& params,
                                       const CostVsLengthOptions& options);

/// `epsilon,hop_count,fraction` rows, one block per experiment.
void write_privacy_csv(std::ostream& out, std::span<const std::pair<double, PathLengthStats>> by_epsilon);
void write_single_hop_csv(std::ostream& out, std::span<const std::pair<double, PathLengthStats>> by_epsilon);
void write_plausibility_csv(std::ostream& out, std::span<const PlausibilityCurve> curves);
void write_cost_vs_length_csv(std::ostream& out, std::span<const LengthCost> rows);

}  // namespace lnsim
