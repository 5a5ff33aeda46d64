#include "lnsim/profitability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "lnsim/csv.hpp"

namespace lnsim {

std::optional<double> annual_roi(double daily_income_sat, double capacity_sat) {
  if (!(capacity_sat > 0)) return std::nullopt;
  return daily_income_sat * 365.0 / capacity_sat;
}

std::optional<EconomicalFee> economical_fee(double advertised_fee_sat, double capacity_sat, double daily_income_sat,
                                            double target_roi) {
  if (!(daily_income_sat > 0)) return std::nullopt;
  const double required = target_roi * capacity_sat / 365.0;
  const double ratio = required / daily_income_sat;
  return EconomicalFee{advertised_fee_sat * ratio, ratio};
}

std::optional<FeeWeighting> parse_fee_weighting(std::string_view name) {
  if (name == "capacity") return FeeWeighting::kCapacity;
  if (name == "uniform") return FeeWeighting::kUniform;
  if (name == "realized") return FeeWeighting::kRealized;
  return std::nullopt;
}

std::string_view to_string(FeeWeighting w) {
  switch (w) {
    case FeeWeighting::kCapacity: return "capacity";
    case FeeWeighting::kUniform: return "uniform";
    case FeeWeighting::kRealized: return "realized";
  }
  return "?";
}

std::map<std::string, double> advertised_fees(std::span<const SnapshotGraph> snapshots, const EntityMap& entities,
                                              Satoshi amount, FeeWeighting weighting) {
  struct Acc {
    double weighted = 0;
    double weight = 0;
  };
  std::map<std::string, Acc> acc;
  for (const SnapshotGraph& g : snapshots) {
    std::vector<const std::string*> entity_of(g.node_count());
    for (NodeIndex n = 0; n < g.node_count(); ++n) entity_of[n] = &entities.entity_of(g.node_id(n));
    for (const DirectedChannelEdge& e : g.edges()) {
      const double w = weighting == FeeWeighting::kCapacity ? static_cast<double>(e.capacity_sat) : 1.0;
      Acc& a = acc[*entity_of[e.trg]];
      a.weighted += w * to_sat(edge_fee(e.policy, amount));
      a.weight += w;
    }
  }
  std::map<std::string, double> out;
  for (const auto& [name, a] : acc) {
    if (a.weight > 0) out.emplace(name, a.weighted / a.weight);
  }
  return out;
}

std::map<std::string, double> entity_capacities(std::span<const SnapshotGraph> snapshots, const EntityMap& entities) {
  std::map<std::string, double> total;
  for (const SnapshotGraph& g : snapshots) {
    for (const Channel& c : g.channels()) {
      const std::string& a = entities.entity_of(g.node_id(c.node_a));
      const std::string& b = entities.entity_of(g.node_id(c.node_b));
      total[a] += static_cast<double>(c.capacity_sat);
      if (b != a) total[b] += static_cast<double>(c.capacity_sat);
    }
  }
  if (!snapshots.empty()) {
    for (auto& [_, v] : total) v /= static_cast<double>(snapshots.size());
  }
  return total;
}

std::map<std::string, double> load_entity_capacities(const std::string& path) {
  const auto reader = csv::Reader::open(path);
  const std::size_t entity_col = reader.column("entity");
  const std::size_t cap_col = reader.column("capacity_sat");
  std::map<std::string, double> out;
  for (const auto& rec : reader.records()) {
    const double cap = reader.parse_double(rec, cap_col, "capacity_sat");
    if (cap < 0) reader.fail(rec.line, "negative capacity_sat");
    out[rec.fields[entity_col]] = cap;
  }
  return out;
}

double mean_network_capacity(std::span<const SnapshotGraph> snapshots) {
  if (snapshots.empty()) return 0;
  double sum = 0;
  for (const auto& g : snapshots) sum += static_cast<double>(g.total_capacity_sat());
  return sum / static_cast<double>(snapshots.size());
}

namespace {

// 1-based ranks by decreasing key; absent keys rank last, ties by name.
template <class Key>
void assign_ranks(std::vector<EntityReport>& rows, Key key, int EntityReport::*rank) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const std::optional<double> ka = key(rows[a]);
    const std::optional<double> kb = key(rows[b]);
    if (ka.has_value() != kb.has_value()) return ka.has_value();
    if (ka && *ka != *kb) return *ka > *kb;
    return rows[a].entity < rows[b].entity;
  });
  for (std::size_t i = 0; i < order.size(); ++i) rows[order[i]].*rank = static_cast<int>(i + 1);
}

std::string opt(const std::optional<double>& v, int decimals) {
  return v ? csv::format_fixed(*v, decimals) : std::string();
}

}  // namespace

std::vector<EntityReport> entity_report(const AggregateResult& aggregate,
                                        const std::map<std::string, double>& advertised,
                                        const std::map<std::string, double>& capacities,
                                        double network_capacity_sat, const EntityReportOptions& options) {
  std::vector<EntityReport> rows;
  for (const auto& [entity, mean] : aggregate.entity_means) {
    if (mean.routing_income_sat < options.min_income_sat || mean.routing_traffic < options.min_traffic) continue;
    EntityReport r;
    r.entity = entity;
    r.daily_income_sat = mean.routing_income_sat;
    r.daily_traffic = mean.routing_traffic;
    if (options.weighting == FeeWeighting::kRealized) {
      r.advertised_fee_sat = mean.routing_income_sat / mean.routing_traffic;
    } else if (const auto it = advertised.find(entity); it != advertised.end()) {
      r.advertised_fee_sat = it->second;
    }
    if (const auto it = capacities.find(entity); it != capacities.end()) {
      r.capacity_sat = it->second;
      if (network_capacity_sat > 0 && it->second <= network_capacity_sat) {
        r.capacity_fraction = it->second / network_capacity_sat;
      } else {
        spdlog::warn("capacity of {} exceeds the network capacity; fraction left empty", entity);
      }
      r.annual_roi = annual_roi(r.daily_income_sat, it->second);
      if (r.advertised_fee_sat) {
        if (const auto fee = economical_fee(*r.advertised_fee_sat, it->second, r.daily_income_sat,
                                            options.target_roi)) {
          r.fee_ratio = fee->fee_ratio;
          r.economical_fee_sat = fee->fee_sat;
        }
      }
    } else {
      spdlog::warn("no capacity known for entity {}", entity);
    }
    rows.push_back(std::move(r));
  }
  assign_ranks(rows, [](const EntityReport& r) { return r.annual_roi; }, &EntityReport::rank_roi);
  assign_ranks(rows, [](const EntityReport& r) { return r.advertised_fee_sat; }, &EntityReport::rank_fee);
  assign_ranks(rows, [](const EntityReport& r) { return std::optional<double>(r.daily_traffic); },
               &EntityReport::rank_traffic);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.rank_roi < b.rank_roi; });
  return rows;
}

void write_entity_report_csv(std::ostream& out, std::span<const EntityReport> rows, std::string_view capacity_source) {
  out << "entity,capacity_sat,capacity_fraction,advertised_fee_sat,daily_income_sat,daily_traffic,annual_roi,"
         "fee_ratio,economical_fee_sat,rank_roi,rank_fee,rank_traffic,capacity_source\n";
  for (const auto& r : rows) {
    csv::write_row(out, {r.entity, opt(r.capacity_sat, 0), opt(r.capacity_fraction, 6), opt(r.advertised_fee_sat, 1),
                         csv::format_fixed(r.daily_income_sat, 1), csv::format_fixed(r.daily_traffic, 1),
                         opt(r.annual_roi, 6), opt(r.fee_ratio, 4), opt(r.economical_fee_sat, 1),
                         std::to_string(r.rank_roi), std::to_string(r.rank_fee), std::to_string(r.rank_traffic),
                         std::string(capacity_source)});
  }
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view name) {
  if (name == "alpha") return SweepAxis::kAlpha;
  if (name == "tau") return SweepAxis::kTau;
  return std::nullopt;
}

std::string_view to_string(SweepAxis axis) { return axis == SweepAxis::kAlpha ? "alpha" : "tau"; }

std::vector<SweepRow> sweep(const SnapshotLoader& load, Satoshi base_alpha, const MerchantSet& merchants,
                            const EntityMap& entities, const SimParams& params, SweepAxis axis,
                            std::span<const double> values, const ExperimentOptions& options) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  std::vector<SnapshotGraph> fixed;
  if (axis == SweepAxis::kTau) fixed = load(base_alpha);

  std::vector<SweepRow> rows;
  for (const double value : values) {
    if (options.cancel != nullptr && options.cancel->load()) break;
    SimParams p = params;
    std::vector<SnapshotGraph> loaded;
    if (axis == SweepAxis::kAlpha) {
      if (!(value >= 1)) throw std::invalid_argument("alpha must be at least 1");
      p.amount = static_cast<Satoshi>(std::llround(value));
      loaded = load(p.amount);
    } else {
      if (value < 0 || value != std::floor(value)) throw std::invalid_argument("tau must be a non-negative integer");
      p.tau = static_cast<std::int64_t>(value);
    }
    std::vector<SnapshotGraph>& graphs = axis == SweepAxis::kAlpha ? loaded : fixed;
    for (auto& g : graphs) g.label_merchants(merchants);
    spdlog::info("sweep {}={}", to_string(axis), value);
    const AggregateResult result = run_experiment(graphs, entities, p, options);

    SweepRow network{value, "", 0, 0, std::nullopt, result.failure_fraction(), result.mean_path_length()};
    rows.push_back(network);
    const auto emit = [&](const std::string& name, const NodeMean* m) {
      SweepRow r = network;
      r.entity = name;
      if (m != nullptr) {
        r.income_sat = m->routing_income_sat;
        r.traffic = m->routing_traffic;
        if (m->routing_traffic > 0) r.income_per_tx_sat = m->routing_income_sat / m->routing_traffic;
      }
      rows.push_back(std::move(r));
    };
    if (entities.empty()) {
      for (const auto& [name, m] : result.entity_means) emit(name, &m);
    } else {
      for (const auto& name : entities.entity_names()) {
        const auto it = result.entity_means.find(name);
        emit(name, it == result.entity_means.end() ? nullptr : &it->second);
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "value,entity,income_sat,traffic,income_per_tx_sat,failure_fraction,mean_path_len\n";
  for (const auto& r : rows) {
    const bool network = r.entity.empty();
    csv::write_row(out, {csv::format_fixed(r.value, r.value == std::floor(r.value) ? 0 : 6), r.entity,
                         network ? "" : csv::format_fixed(r.income_sat, 3),
                         network ? "" : csv::format_fixed(r.traffic, 3), opt(r.income_per_tx_sat, 3),
                         csv::format_fixed(r.failure_fraction, 6), csv::format_fixed(r.mean_path_len, 6)});
  }
}

std::vector<DepletionRatio> depletion_ratio(std::span<const SnapshotGraph> snapshots, const EntityMap& entities,
                                            const SimParams& params, const ExperimentOptions& options) {
  SimParams real = params;
  real.ignore_depletion = false;
  SimParams optimistic = params;
  optimistic.ignore_depletion = true;
  const AggregateResult with = run_experiment(snapshots, entities, real, options);
  const AggregateResult without = run_experiment(snapshots, entities, optimistic, options);

  std::vector<DepletionRatio> out;
  for (const auto& [entity, m] : without.entity_means) {
    if (m.routing_income_sat <= 0) continue;
    const auto it = with.entity_means.find(entity);
    const double income = it == with.entity_means.end() ? 0.0 : it->second.routing_income_sat;
    out.push_back({entity, income, m.routing_income_sat, income / m.routing_income_sat});
  }
  return out;
}

void write_depletion_csv(std::ostream& out, std::span<const DepletionRatio> rows) {
  out << "entity,income_sat,optimistic_income_sat,ratio\n";
  for (const auto& r : rows) {
    csv::write_row(out, {r.entity, csv::format_fixed(r.income_sat, 3), csv::format_fixed(r.optimistic_income_sat, 3),
                         csv::format_fixed(r.ratio, 6)});
  }
}

std::vector<RemovalFailure> entity_removal_failures(std::span<const SnapshotGraph> snapshots,
                                                    const EntityMap& entities,
                                                    std::span<const std::string> removed_entities,
                                                    const SimParams& params, const ExperimentOptions& options) {
  ExperimentOptions base = options;
  base.removed_nodes.clear();
  const double baseline = run_experiment(snapshots, entities, params, base).failure_fraction();

  std::vector<RemovalFailure> out;
  for (const auto& entity : removed_entities) {
    if (options.cancel != nullptr && options.cancel->load()) break;
    ExperimentOptions reduced = base;
    for (auto& m : entities.members(entity)) reduced.removed_nodes.insert(std::move(m));
    // An unmapped node is its own entity.
    if (reduced.removed_nodes.empty()) reduced.removed_nodes.insert(entity);
    const AggregateResult r = run_experiment(snapshots, entities, params, reduced);
    out.push_back({entity, r.failure_fraction(), baseline});
  }
  return out;
}

void write_removal_failures_csv(std::ostream& out, std::span<const RemovalFailure> rows) {
  out << "entity,failure_fraction,baseline_failure_fraction\n";
  for (const auto& r : rows) {
    csv::write_row(out, {r.entity, csv::format_fixed(r.failure_fraction, 6),
                         csv::format_fixed(r.baseline_failure_fraction, 6)});
  }
}

}  // namespace lnsim
