#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lnsim/sim_engine.hpp"

namespace lnsim {

/// income * 365 / capacity; absent when capacity is not positive.
std::optional<double> annual_roi(double daily_income_sat, double capacity_sat);

struct EconomicalFee {
  double fee_sat = 0;
  double fee_ratio = 0;  // required income / actual income
};

/// Fee that would earn `target_roi` a year at the same traffic. Absent when
/// the income is not positive.
std::optional<EconomicalFee> economical_fee(double advertised_fee_sat, double capacity_sat, double daily_income_sat,
                                            double target_roi = 0.05);

/// How an entity's advertised fee is aggregated over the edges it charges for.
enum class FeeWeighting {
  kCapacity,  // capacity-weighted mean of edge fees
  kUniform,   // plain mean of edge fees
  kRealized,  // simulated income / simulated traffic
};

std::optional<FeeWeighting> parse_fee_weighting(std::string_view name);
std::string_view to_string(FeeWeighting w);

/// Mean fee at `amount` over the directed edges whose fee is credited to a
/// member of each entity (edges entering a member), pooled over snapshots.
/// kRealized is not handled here. Entities without such edges are omitted.
std::map<std::string, double> advertised_fees(std::span<const SnapshotGraph> snapshots, const EntityMap& entities,
                                              Satoshi amount, FeeWeighting weighting);

/// Per entity, the capacity of channels touching a member (each channel once),
/// averaged over snapshots.
std::map<std::string, double> entity_capacities(std::span<const SnapshotGraph> snapshots, const EntityMap& entities);

/// Reads `entity,capacity_sat`.
std::map<std::string, double> load_entity_capacities(const std::string& path);

/// Mean total network capacity over snapshots.
double mean_network_capacity(std::span<const SnapshotGraph> snapshots);

struct EntityReport {
  std::string entity;
  std::optional<double> capacity_sat;
  std::optional<double> capacity_fraction;
  std::optional<double> advertised_fee_sat;
  double daily_income_sat = 0;
  double daily_traffic = 0;
  std::optional<double> annual_roi;
  std::optional<double> fee_ratio;
  std::optional<double> economical_fee_sat;
  int rank_roi = 0;
  int rank_fee = 0;
  int rank_traffic = 0;
};

struct EntityReportOptions {
  double min_income_sat = 50;
  double min_traffic = 10;
  double target_roi = 0.05;
  FeeWeighting weighting = FeeWeighting::kCapacity;
};

/// Table of the entities passing both thresholds. `advertised` is ignored in
/// kRealized mode. Ranks are 1-based in decreasing order of RoI, fee and
/// traffic; ties go by name and absent values rank last.
std::vector<EntityReport> entity_report(const AggregateResult& aggregate,
                                        const std::map<std::string, double>& advertised,
                                        const std::map<std::string, double>& capacities,
                                        double network_capacity_sat, const EntityReportOptions& options = {});

void write_entity_report_csv(std::ostream& out, std::span<const EntityReport> rows, std::string_view capacity_source);

enum class SweepAxis { kAlpha, kTau };

std::optional<SweepAxis> parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

/// Loads the snapshots filtered at a given alpha.
using SnapshotLoader = std::function<std::vector<SnapshotGraph>(Satoshi alpha)>;

struct SweepRow {
  double value = 0;
  std::string entity;  // empty for the network-wide row
  double income_sat = 0;
  double traffic = 0;
  std::optional<double> income_per_tx_sat;
  double failure_fraction = 0;
  double mean_path_len = 0;
};

/// One experiment per value; an alpha value sets both the payment amount
/// and the capacity filter passed to `load`. Entity rows cover the entities of `entities`
/// or, when it is empty, every node. Throws std::invalid_argument on an
/// empty value list.
std::vector<SweepRow> sweep(const SnapshotLoader& load, Satoshi base_alpha, const MerchantSet& merchants,
                            const EntityMap& entities, const SimParams& params, SweepAxis axis,
                            std::span<const double> values, const ExperimentOptions& options = {});

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct DepletionRatio {
  std::string entity;
  double income_sat = 0;
  double optimistic_income_sat = 0;
  double ratio = 0;
};

/// Income with depletion over income with depletion ignored, same seeds.
/// Entities with zero optimistic income are omitted.
std::vector<DepletionRatio> depletion_ratio(std::span<const SnapshotGraph> snapshots, const EntityMap& entities,
                                            const SimParams& params, const ExperimentOptions& options = {});

void write_depletion_csv(std::ostream& out, std::span<const DepletionRatio> rows);

struct RemovalFailure {
  std::string entity;
  double failure_fraction = 0;
  double baseline_failure_fraction = 0;
};

/// Failure fraction after routing around every member of each entity.
/// Transactions are the baseline ones (same seeds); payments from or to a
/// removed node fail.
std::vector<RemovalFailure> entity_removal_failures(std::span<const SnapshotGraph> snapshots,
                                                    const EntityMap& entities,
                                                    std::span<const std::string> removed_entities,
                                                    const SimParams& params, const ExperimentOptions& options = {});

void write_removal_failures_csv(std::ostream& out, std::span<const RemovalFailure> rows);

}  // namespace lnsim
