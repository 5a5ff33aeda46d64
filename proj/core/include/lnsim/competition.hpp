#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lnsim/sim_engine.hpp"

namespace lnsim {

/// Balances against which the detour around a removed node is priced.
enum class DeltaReference {
  /// Fresh balances identical to the day's initial draw; both the original
  /// and the detour cost are evaluated there.
  kInitialBalances,
  /// The day is replayed; each detour is priced on the balances right before
  /// the original payment, against the cost that payment actually paid.
  kPrePaymentBalances,
};

struct FeeIncrement {
  Millisat beta_star = 0;
  Millisat gain = 0;
};

/// beta* = argmax over the distinct deltas b of b * |{delta >= b}|, ties
/// toward the smaller b. Empty input gives (0, 0).
FeeIncrement optimal_base_fee_increment(std::span<const Millisat> deltas);

struct RemovalAnalysis {
  std::string target;
  std::int64_t tau_x = 0;         // baseline payments forwarded by the target
  std::int64_t phi_x = 0;         // ... of which no detour exists
  std::vector<Millisat> deltas;   // extra fee of the detour, one per reroutable payment
  FeeIncrement increment;

  /// phi/tau, absent when tau is zero.
  std::optional<double> failure_ratio() const;
};

/// Re-prices the baseline payments of one cell that were forwarded by any
/// node of `removed`. `baseline` must have been simulated with
/// keep_outcomes and no node removal. Throws std::invalid_argument if
/// `removed` is empty.
RemovalAnalysis removal_impact(const SnapshotGraph& graph, const DayResult& baseline,
                               std::span<const NodeIndex> removed, const SimParams& params,
                               DeltaReference reference = DeltaReference::kInitialBalances,
                               std::string target_name = {});

/// Removal analysis of one target pooled over all cells of an experiment.
struct TargetSummary {
  std::string target;
  std::int64_t tau_x = 0;  // summed over cells
  std::int64_t phi_x = 0;
  double mean_tau_x = 0;   // per cell
  double mean_phi_x = 0;
  double mean_beta_star_sat = 0;
  double mean_gain_sat = 0;
  int cells = 0;

  std::optional<double> failure_ratio() const;
};

/// What to remove: a single node or a whole entity.
struct RemovalTarget {
  std::string name;
  std::set<std::string> nodes;
};

/// Targets for "top:N": the N nodes with the highest mean routing income.
std::vector<RemovalTarget> top_income_targets(const AggregateResult& baseline, std::size_t n);

/// Re-simulates every (snapshot, run) baseline cell with the seeds of
/// run_experiment and analyses each target in it. Targets absent from a
/// snapshot count as zero traffic there. Identical for any worker count.
std::vector<TargetSummary> analyze_targets(std::span<const SnapshotGraph> snapshots, const SimParams& params,
                                           std::span<const RemovalTarget> targets, DeltaReference reference,
                                           int workers = 1, const std::atomic<bool>* cancel = nullptr);

struct BandReport {
  std::string band;             // e.g. "1-10", "101-"
  std::size_t first_rank = 0;   // 1-based, inclusive
  std::size_t last_rank = 0;    // 0 = open ended
  std::size_t members = 0;
  std::size_t ratio_members = 0;  // members with tau > 0
  double mean_failure_ratio = 0;
  double mean_beta_star_sat = 0;
  double mean_gain_sat = 0;
};

/// Groups target summaries by income rank bands 1-10, 11-20, 21-50, 51-100,
/// 101-. `income_ranking` lists target names by decreasing income; targets
/// missing from it are ignored. Targets with tau = 0 are left out of the
/// failure-ratio mean.
std::vector<BandReport> group_report(std::span<const TargetSummary> summaries,
                                     std::span<const std::string> income_ranking);

/// Node ids ordered by decreasing mean routing income (ties by id).
std::vector<std::string> income_ranking(const AggregateResult& result);

void write_removal_csv(std::ostream& out, std::span<const TargetSummary> summaries);
void write_band_csv(std::ostream& out, std::span<const BandReport> bands);

}  // namespace lnsim
