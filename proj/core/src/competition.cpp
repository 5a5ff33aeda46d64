#include "lnsim/competition.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "lnsim/csv.hpp"
#include "lnsim/parallel.hpp"

namespace lnsim {

FeeIncrement optimal_base_fee_increment(std::span<const Millisat> deltas) {
  std::vector<Millisat> sorted(deltas.begin(), deltas.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  FeeIncrement best;
  // Walking from the largest delta down, the count of deltas >= b is the
  // position after the last occurrence of b.
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0) throw std::invalid_argument("fee deltas must be non-negative");
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    const Millisat gain = sorted[i] * static_cast<Millisat>(i + 1);
    if (gain > best.gain || (gain == best.gain && sorted[i] < best.beta_star)) {
      best = {sorted[i], gain};
    }
  }
  return best;
}

std::optional<double> RemovalAnalysis::failure_ratio() const {
  if (tau_x == 0) return std::nullopt;
  return static_cast<double>(phi_x) / static_cast<double>(tau_x);
}

std::optional<double> TargetSummary::failure_ratio() const {
  if (tau_x == 0) return std::nullopt;
  return static_cast<double>(phi_x) / static_cast<double>(tau_x);
}

namespace {

bool forwarded_by(const PaymentOutcome& o, const std::vector<char>& mask) {
  for (std::size_t i = 1; i + 1 < o.path.size(); ++i) {
    if (mask[o.path[i]] != 0) return true;
  }
  return false;
}

}  // namespace

RemovalAnalysis removal_impact(const SnapshotGraph& graph, const DayResult& baseline,
                               std::span<const NodeIndex> removed, const SimParams& params,
                               DeltaReference reference, std::string target_name) {
  if (removed.empty()) throw std::invalid_argument("removal target is empty");
  if (baseline.graph != &graph) throw ContractViolation("baseline was simulated on another graph");
  if (graph.node_count() >= 2 && baseline.outcomes.size() != static_cast<std::size_t>(baseline.attempts())) {
    throw ContractViolation("baseline cell was simulated without keep_outcomes");
  }
  std::vector<char> mask(graph.node_count(), 0);
  for (const NodeIndex n : removed) mask.at(n) = 1;

  RemovalAnalysis analysis;
  analysis.target = std::move(target_name);
  Router router(graph);
  const RouteOptions plain = RouteOptions::from(params);
  RouteOptions masked = plain;
  masked.excluded = mask;

  BalanceState state = initial_balances(graph, baseline.cell_seed, params.ignore_depletion);
  for (const PaymentOutcome& original : baseline.outcomes) {
    if (!original.ok()) continue;
    if (forwarded_by(original, mask)) {
      ++analysis.tau_x;
      const PaymentOutcome detour = router.route(state, original.transaction, masked);
      if (!detour.ok()) {
        ++analysis.phi_x;
      } else if (reference == DeltaReference::kInitialBalances) {
        const PaymentOutcome best = router.route(state, original.transaction, plain);
        analysis.deltas.push_back(detour.total_fee_msat - best.total_fee_msat);
      } else {
        analysis.deltas.push_back(detour.total_fee_msat - original.total_fee_msat);
      }
    }
    if (reference == DeltaReference::kPrePaymentBalances) {
      state.apply_payment(original.edges, original.transaction.amount);
    }
  }
  analysis.increment = optimal_base_fee_increment(analysis.deltas);
  return analysis;
}

std::vector<std::string> income_ranking(const AggregateResult& result) {
  std::vector<std::pair<double, std::string>> items;
  items.reserve(result.node_means.size());
  for (const auto& [id, m] : result.node_means) items.emplace_back(m.routing_income_sat, id);
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& [_, id] : items) out.push_back(std::move(id));
  return out;
}

std::vector<RemovalTarget> top_income_targets(const AggregateResult& baseline, std::size_t n) {
  std::vector<RemovalTarget> out;
  for (const auto& id : income_ranking(baseline)) {
    if (out.size() == n) break;
    out.push_back({id, {id}});
  }
  return out;
}

std::vector<TargetSummary> analyze_targets(std::span<const SnapshotGraph> snapshots, const SimParams& params,
                                           std::span<const RemovalTarget> targets, DeltaReference reference,
                                           int workers, const std::atomic<bool>* cancel) {
  params.validate();
  const auto runs = static_cast<std::size_t>(params.runs);
  const std::size_t cells = snapshots.size() * runs;
  // per_cell[c][t]; a cell skipped on cancellation stays empty
  std::vector<std::vector<RemovalAnalysis>> per_cell(cells);
  parallel_for(
      cells, workers,
      [&](std::size_t c) {
        const std::size_t snap = c / runs;
        const int run = static_cast<int>(c % runs);
        const SnapshotGraph& graph = snapshots[snap];
        DayOptions keep;
        keep.keep_outcomes = true;
        const DayResult day = simulate_day(graph, params, cell_seed(params.seed, snap, run), keep);
        std::vector<RemovalAnalysis> row(targets.size());
        for (std::size_t t = 0; t < targets.size(); ++t) {
          std::vector<NodeIndex> nodes;
          for (const auto& id : targets[t].nodes) {
            if (const auto n = graph.find_node(id)) nodes.push_back(*n);
          }
          if (nodes.empty()) continue;
          row[t] = removal_impact(graph, day, nodes, params, reference, targets[t].name);
        }
        per_cell[c] = std::move(row);
      },
      cancel);

  std::vector<TargetSummary> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    TargetSummary& s = out[t];
    s.target = targets[t].name;
    for (std::size_t c = 0; c < cells; ++c) {
      if (per_cell[c].empty()) continue;
      const RemovalAnalysis& a = per_cell[c][t];
      s.tau_x += a.tau_x;
      s.phi_x += a.phi_x;
      s.mean_beta_star_sat += to_sat(a.increment.beta_star);
      s.mean_gain_sat += to_sat(a.increment.gain);
      ++s.cells;
    }
    if (s.cells > 0) {
      const double n = s.cells;
      s.mean_tau_x = static_cast<double>(s.tau_x) / n;
      s.mean_phi_x = static_cast<double>(s.phi_x) / n;
      s.mean_beta_star_sat /= n;
      s.mean_gain_sat /= n;
    }
  }
  return out;
}

std::vector<BandReport> group_report(std::span<const TargetSummary> summaries,
                                     std::span<const std::string> income_ranking) {
  std::vector<BandReport> bands = {
      {"1-10", 1, 10}, {"11-20", 11, 20}, {"21-50", 21, 50}, {"51-100", 51, 100}, {"101-", 101, 0}};
  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < income_ranking.size(); ++i) rank.emplace(income_ranking[i], i + 1);

  for (const TargetSummary& s : summaries) {
    const auto it = rank.find(s.target);
    if (it == rank.end()) continue;
    for (auto& band : bands) {
      if (it->second < band.first_rank || (band.last_rank != 0 && it->second > band.last_rank)) continue;
      ++band.members;
      band.mean_beta_star_sat += s.mean_beta_star_sat;
      band.mean_gain_sat += s.mean_gain_sat;
      if (const auto r = s.failure_ratio()) {
        ++band.ratio_members;
        band.mean_failure_ratio += *r;
      }
      break;
    }
  }
  for (auto& band : bands) {
    if (band.members > 0) {
      band.mean_beta_star_sat /= static_cast<double>(band.members);
      band.mean_gain_sat /= static_cast<double>(band.members);
    }
    if (band.ratio_members > 0) band.mean_failure_ratio /= static_cast<double>(band.ratio_members);
  }
  return bands;
}

void write_removal_csv(std::ostream& out, std::span<const TargetSummary> summaries) {
  out << "target,tau_x,phi_x,failure_ratio,beta_star_sat,gain_sat\n";
  for (const auto& s : summaries) {
    const auto ratio = s.failure_ratio();
    csv::write_row(out, {s.target, csv::format_fixed(s.mean_tau_x, 3), csv::format_fixed(s.mean_phi_x, 3),
                         ratio ? csv::format_fixed(*ratio, 6) : "", csv::format_fixed(s.mean_beta_star_sat, 1),
                         csv::format_fixed(s.mean_gain_sat, 1)});
  }
}

void write_band_csv(std::ostream& out, std::span<const BandReport> bands) {
  out << "band,members,ratio_members,mean_failure_ratio,mean_beta_star_sat,mean_gain_sat\n";
  for (const auto& b : bands) {
    csv::write_row(out, {b.band, std::to_string(b.members), std::to_string(b.ratio_members),
                         csv::format_fixed(b.mean_failure_ratio, 6), csv::format_fixed(b.mean_beta_star_sat, 1),
                         csv::format_fixed(b.mean_gain_sat, 1)});
  }
}

}  // namespace lnsim
