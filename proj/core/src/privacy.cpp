#include "lnsim/privacy.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

#include "lnsim/csv.hpp"
#include "lnsim/parallel.hpp"

namespace lnsim {

namespace {

SingleHopFraction fractions(std::int64_t two_hop, std::int64_t direct, std::int64_t successes) {
  SingleHopFraction f;
  if (successes > 0) f.of_all = static_cast<double>(two_hop) / static_cast<double>(successes);
  if (successes - direct > 0) f.of_routed = static_cast<double>(two_hop) / static_cast<double>(successes - direct);
  return f;
}

}  // namespace

SingleHopFraction single_hop_fraction(std::span<const PaymentOutcome> outcomes) {
  std::int64_t two = 0, one = 0, ok = 0;
  for (const auto& o : outcomes) {
    if (!o.ok()) continue;
    ++ok;
    if (o.hop_count() == 1) ++one;
    if (o.hop_count() == 2) ++two;
  }
  return fractions(two, one, ok);
}

SingleHopFraction single_hop_fraction(const PathLengthStats& stats) {
  const auto count = [&](int h) {
    const auto it = stats.histogram.find(h);
    return it == stats.histogram.end() ? std::int64_t{0} : it->second;
  };
  return fractions(count(2), count(1), stats.successes);
}

PlausibilityCurve plausibility_curve(const SnapshotGraph& graph, Satoshi amount, std::span<const int> thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("plausibility thresholds must be ascending");
  }
  std::vector<int> qualifying(graph.node_count(), 0);
  for (const Channel& c : graph.channels()) {
    if (c.capacity_sat < amount) continue;
    ++qualifying[c.node_a];
    ++qualifying[c.node_b];
  }
  PlausibilityCurve curve;
  curve.amount = amount;
  const double n = static_cast<double>(graph.node_count());
  for (const int d : thresholds) {
    const auto above = std::count_if(qualifying.begin(), qualifying.end(), [d](int q) { return q > d; });
    curve.points.emplace_back(d, n > 0 ? static_cast<double>(above) / n : 0.0);
  }
  return curve;
}

void GAParams::validate() const {
  if (target_length < 1) throw std::invalid_argument("target_length must be at least 1");
  if (population_size < 2) throw std::invalid_argument("population_size must be at least 2");
  if (generations < 0) throw std::invalid_argument("generations must be non-negative");
  if (tournament_size < 1) throw std::invalid_argument("tournament_size must be at least 1");
  if (elite_count < 0 || elite_count >= population_size) {
    throw std::invalid_argument("elite_count must lie in [0, population_size)");
  }
  if (length_penalty < 0) throw std::invalid_argument("length_penalty must be non-negative");
}

namespace {

struct Individual {
  std::vector<NodeIndex> nodes;
  std::vector<EdgeIndex> edges;
  Millisat cost = 0;
  Millisat fitness = 0;

  int hops() const { return static_cast<int>(edges.size()); }
};

bool fitter(const Individual& a, const Individual& b) {
  if (a.fitness != b.fitness) return a.fitness < b.fitness;
  return a.nodes < b.nodes;
}

// Bounds the breadth-first searches one shrinking mutation may run.
constexpr std::size_t kStretchTries = 8;

class PathSpace {
 public:
  PathSpace(const SnapshotGraph& graph, const BalanceState& state, Satoshi amount, bool count_last, int target,
            Millisat penalty)
      : graph_(graph), state_(state), amount_(amount), count_last_(count_last), target_(target), penalty_(penalty) {}

  bool feasible(EdgeIndex e) const { return !graph_.edge(e).policy.disabled && state_.usable(e, amount_); }

  /// Cheapest feasible edge u->v (lowest index on ties), or kNoEdge.
  EdgeIndex best_edge(NodeIndex u, NodeIndex v) const {
    const auto out = graph_.out_edges(u);
    auto it = std::lower_bound(out.begin(), out.end(), v,
                               [&](EdgeIndex e, NodeIndex target) { return graph_.edge(e).trg < target; });
    EdgeIndex best = kNoEdge;
    Millisat best_fee = 0;
    for (; it != out.end() && graph_.edge(*it).trg == v; ++it) {
      if (!feasible(*it)) continue;
      const Millisat fee = edge_fee(graph_.edge(*it).policy, amount_);
      if (best == kNoEdge || fee < best_fee) {
        best = *it;
        best_fee = fee;
      }
    }
    return best;
  }

  void evaluate(Individual& ind) const {
    ind.cost = path_cost(graph_, ind.edges, amount_, count_last_).total_msat;
    ind.fitness = ind.cost + penalty_ * std::abs(ind.hops() - target_);
  }

  /// Fewest-hop feasible path from `from` to `to` through nodes not marked in
  /// `blocked`, as a node sequence including both ends. Empty when none exists.
  std::vector<NodeIndex> hop_path(NodeIndex from, NodeIndex to, const std::vector<char>& blocked) const {
    std::vector<NodeIndex> parent(graph_.node_count(), kNoNode);
    std::vector<NodeIndex> queue{from};
    parent[from] = from;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeIndex u = queue[head];
      for (const EdgeIndex e : graph_.out_edges(u)) {
        const NodeIndex w = graph_.edge(e).trg;
        if (parent[w] != kNoNode || (blocked[w] && w != to) || !feasible(e)) continue;
        parent[w] = u;
        if (w == to) {
          std::vector<NodeIndex> path{to};
          while (path.back() != from) path.push_back(parent[path.back()]);
          std::reverse(path.begin(), path.end());
          return path;
        }
        queue.push_back(w);
      }
    }
    return {};
  }

  /// Replaces nodes[i..j] by `segment` (which starts at nodes[i] and ends at nodes[j]).
  void splice(Individual& ind, std::size_t i, std::size_t j, const std::vector<NodeIndex>& segment) const {
    std::vector<NodeIndex> nodes(ind.nodes.begin(), ind.nodes.begin() + static_cast<std::ptrdiff_t>(i));
    nodes.insert(nodes.end(), segment.begin(), segment.end());
    nodes.insert(nodes.end(), ind.nodes.begin() + static_cast<std::ptrdiff_t>(j) + 1, ind.nodes.end());
    ind.nodes = std::move(nodes);
    ind.edges.clear();
    for (std::size_t k = 0; k + 1 < ind.nodes.size(); ++k) ind.edges.push_back(best_edge(ind.nodes[k], ind.nodes[k + 1]));
  }

  /// Next hop toward `to` on a fewest-hop feasible path avoiding `blocked`,
  /// for every node that has one; kNoNode elsewhere and at `to` itself.
  std::vector<NodeIndex> toward(NodeIndex to, const std::vector<char>& blocked) const {
    std::vector<NodeIndex> next(graph_.node_count(), kNoNode);
    std::vector<char> seen(graph_.node_count(), 0);
    std::vector<NodeIndex> queue{to};
    seen[to] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeIndex v = queue[head];
      for (const EdgeIndex e : graph_.in_edges(v)) {
        const NodeIndex u = graph_.edge(e).src;
        if (seen[u] || blocked[u] || !feasible(e)) continue;
        seen[u] = 1;
        next[u] = v;
        queue.push_back(u);
      }
    }
    return next;
  }

  /// Replaces edge i by a detour that leaves through a random neighbour off
  /// the path and returns by the fewest hops. Grows the path by at least one.
  bool insert(Individual& ind, Rng& rng) const {
    const std::size_t hops = ind.edges.size();
    std::vector<char> blocked(graph_.node_count(), 0);
    for (const NodeIndex n : ind.nodes) blocked[n] = 1;
    const std::size_t offset = rng.uniform_below(hops);
    std::vector<NodeIndex> candidates;
    for (std::size_t k = 0; k < hops; ++k) {
      const std::size_t i = (offset + k) % hops;
      const NodeIndex u = ind.nodes[i];
      const NodeIndex v = ind.nodes[i + 1];
      const std::vector<NodeIndex> next = toward(v, blocked);
      candidates.clear();
      NodeIndex last = kNoNode;
      for (const EdgeIndex e : graph_.out_edges(u)) {
        const NodeIndex w = graph_.edge(e).trg;
        if (w == last || blocked[w] || next[w] == kNoNode || !feasible(e)) continue;
        last = w;
        candidates.push_back(w);
      }
      if (candidates.empty()) continue;
      std::vector<NodeIndex> segment{u, candidates[rng.uniform_below(candidates.size())]};
      while (segment.back() != v) segment.push_back(next[segment.back()]);
      splice(ind, i, i + 1, segment);
      return true;
    }
    return false;
  }

  /// Replaces a random stretch of at least two hops by a path with fewer hops.
  bool remove(Individual& ind, Rng& rng) const {
    const std::size_t n = ind.nodes.size();
    if (n < 3) return false;
    std::vector<std::pair<std::size_t, std::size_t>> stretches;
    for (std::size_t i = 0; i + 2 < n; ++i) {
      for (std::size_t j = i + 2; j < n; ++j) stretches.emplace_back(i, j);
    }
    std::vector<char> blocked(graph_.node_count(), 0);
    for (const NodeIndex v : ind.nodes) blocked[v] = 1;
    const std::size_t offset = rng.uniform_below(stretches.size());
    const std::size_t tries = std::min<std::size_t>(stretches.size(), kStretchTries);
    for (std::size_t k = 0; k < tries; ++k) {
      const auto [i, j] = stretches[(offset + k) % stretches.size()];
      for (std::size_t m = i + 1; m < j; ++m) blocked[ind.nodes[m]] = 0;
      const std::vector<NodeIndex> segment = hop_path(ind.nodes[i], ind.nodes[j], blocked);
      for (std::size_t m = i + 1; m < j; ++m) blocked[ind.nodes[m]] = 1;
      if (segment.empty() || segment.size() >= j - i + 1) continue;
      splice(ind, i, j, segment);
      return true;
    }
    return false;
  }

  /// One mutation, biased toward the target length.
  Individual mutate(Individual ind, Rng& rng) const {
    const double p_insert = ind.hops() < target_ ? 0.8 : ind.hops() > target_ ? 0.2 : 0.5;
    const bool grow = rng.bernoulli(p_insert);
    const bool changed = grow ? (insert(ind, rng) || remove(ind, rng)) : (remove(ind, rng) || insert(ind, rng));
    if (changed) evaluate(ind);
    return ind;
  }

 private:
  const SnapshotGraph& graph_;
  const BalanceState& state_;
  Satoshi amount_;
  bool count_last_;
  int target_;
  Millisat penalty_;
};

}  // namespace

PaymentOutcome lengthened_path(const SnapshotGraph& graph, const BalanceState& state, NodeIndex sender,
                               NodeIndex recipient, Satoshi amount, const GAParams& ga,
                               const RouteOptions& options) {
  ga.validate();
  Router router(graph);
  const Transaction tx{sender, recipient, amount};
  const PaymentOutcome cheapest = router.route(state, tx, options);
  PaymentOutcome failed;
  failed.transaction = tx;
  if (!cheapest.ok()) return failed;

  const PathSpace space(graph, state, amount, options.count_last_hop_fee, ga.target_length, ga.length_penalty);
  Rng rng(ga.seed);
  std::optional<Individual> best;
  const auto consider = [&](const Individual& ind) {
    if (ind.hops() != ga.target_length) return;
    if (!best || ind.cost < best->cost || (ind.cost == best->cost && ind.nodes < best->nodes)) best = ind;
  };

  Individual seed{cheapest.path, cheapest.edges, 0, 0};
  space.evaluate(seed);
  std::vector<Individual> population{seed};
  consider(seed);
  const int gap = std::max(1, std::abs(seed.hops() - ga.target_length));
  while (static_cast<int>(population.size()) < ga.population_size) {
    Individual ind = seed;
    const auto rounds = rng.uniform_int(1, gap + 1);
    for (std::int64_t r = 0; r < rounds; ++r) ind = space.mutate(std::move(ind), rng);
    consider(ind);
    population.push_back(std::move(ind));
  }

  std::vector<Individual> next;
  for (int gen = 0; gen < ga.generations; ++gen) {
    std::sort(population.begin(), population.end(), fitter);
    next.assign(population.begin(), population.begin() + ga.elite_count);
    while (static_cast<int>(next.size()) < ga.population_size) {
      std::size_t pick = rng.uniform_below(population.size());
      for (int k = 1; k < ga.tournament_size; ++k) {
        const std::size_t other = rng.uniform_below(population.size());
        if (fitter(population[other], population[pick])) pick = other;
      }
      Individual child = space.mutate(population[pick], rng);
      consider(child);
      next.push_back(std::move(child));
    }
    population.swap(next);
  }

  if (!best) return failed;
  PaymentOutcome out;
  out.transaction = tx;
  out.status = PaymentStatus::kSuccess;
  out.path = std::move(best->nodes);
  out.edges = std::move(best->edges);
  const PathCost cost = path_cost(graph, out.edges, amount, options.count_last_hop_fee);
  out.total_fee_msat = cost.total_msat;
  out.intermediary_fees = cost.intermediary_credits;
  out.recipient_fee_msat = cost.recipient_credit;
  return out;
}

std::vector<LengthCost> cost_vs_length(std::span<const SnapshotGraph> snapshots, const SimParams& params,
                                       const CostVsLengthOptions& options) {
  params.validate();
  if (options.samples_per_cell < 1) throw std::invalid_argument("samples_per_cell must be at least 1");
  for (const int L : options.lengths) {
    if (L < 1) throw std::invalid_argument("path lengths must be at least 1");
  }
  const std::size_t slots = options.lengths.size() + 1;  // slot 0: cheapest path
  struct CellCosts {
    std::vector<std::vector<Millisat>> costs;
    std::vector<std::int64_t> attempts;
  };
  const std::size_t runs = static_cast<std::size_t>(params.runs);
  std::vector<CellCosts> cells(snapshots.size() * runs);

  parallel_for(
      cells.size(), options.workers,
      [&](std::size_t c) {
        const std::size_t snap = c / runs;
        const int run = static_cast<int>(c % runs);
        const SnapshotGraph& graph = snapshots[snap];
        const std::uint64_t seed = cell_seed(params.seed, snap, run);
        BalanceState state = initial_balances(graph, seed, params.ignore_depletion);
        const std::vector<Transaction> txs = day_transactions(graph, params, seed);
        const RouteOptions route = RouteOptions::from(params);
        const std::size_t stride =
            std::max<std::size_t>(1, txs.size() / static_cast<std::size_t>(options.samples_per_cell));
        CellCosts& out = cells[c];
        out.costs.resize(slots);
        out.attempts.assign(slots, 0);
        Router router(graph);
        int sampled = 0;
        for (std::size_t i = 0; i < txs.size(); ++i) {
          const PaymentOutcome o = router.route(state, txs[i], route);
          if (!o.ok()) continue;
          if (i % stride == 0 && sampled < options.samples_per_cell) {
            ++sampled;
            ++out.attempts[0];
            out.costs[0].push_back(o.total_fee_msat);
            for (std::size_t k = 0; k < options.lengths.size(); ++k) {
              GAParams ga = options.ga;
              ga.target_length = options.lengths[k];
              ga.seed = derive_seed(seed, {2, i, static_cast<std::uint64_t>(ga.target_length)});
              const PaymentOutcome longer =
                  lengthened_path(graph, state, o.transaction.sender, o.transaction.recipient, o.transaction.amount,
                                  ga, route);
              ++out.attempts[k + 1];
              if (longer.ok()) out.costs[k + 1].push_back(longer.total_fee_msat);
            }
          }
          state.apply_payment(o.edges, o.transaction.amount);
        }
      },
      options.cancel);

  std::vector<LengthCost> result(slots);
  for (std::size_t k = 0; k < slots; ++k) {
    LengthCost& r = result[k];
    r.length = k == 0 ? 0 : options.lengths[k - 1];
    std::vector<Millisat> all;
    for (const CellCosts& cell : cells) {
      if (cell.costs.empty()) continue;  // cancelled before this cell ran
      r.attempts += cell.attempts[k];
      all.insert(all.end(), cell.costs[k].begin(), cell.costs[k].end());
    }
    r.successes = static_cast<std::int64_t>(all.size());
    if (all.empty()) continue;
    std::sort(all.begin(), all.end());
    double sum = 0;
    for (const Millisat m : all) sum += to_sat(m);
    r.mean_cost_sat = sum / static_cast<double>(all.size());
    const std::size_t mid = all.size() / 2;
    r.median_cost_sat = all.size() % 2 == 1 ? to_sat(all[mid]) : (to_sat(all[mid - 1]) + to_sat(all[mid])) / 2.0;
  }
  return result;
}

void write_privacy_csv(std::ostream& out, std::span<const std::pair<double, PathLengthStats>> by_epsilon) {
  out << "epsilon,hop_count,fraction\n";
  for (const auto& [eps, stats] : by_epsilon) {
    for (const auto& [hops, _] : stats.histogram) {
      csv::write_row(out, {csv::format_fixed(eps, 3), std::to_string(hops), csv::format_fixed(stats.fraction(hops), 6)});
    }
  }
}

void write_single_hop_csv(std::ostream& out, std::span<const std::pair<double, PathLengthStats>> by_epsilon) {
  out << "epsilon,single_hop_of_all,single_hop_of_routed,successes\n";
  for (const auto& [eps, stats] : by_epsilon) {
    const SingleHopFraction f = single_hop_fraction(stats);
    csv::write_row(out, {csv::format_fixed(eps, 3), f.of_all ? csv::format_fixed(*f.of_all, 6) : "",
                         f.of_routed ? csv::format_fixed(*f.of_routed, 6) : "", std::to_string(stats.successes)});
  }
}

void write_plausibility_csv(std::ostream& out, std::span<const PlausibilityCurve> curves) {
  out << "amount_sat,threshold,fraction\n";
  for (const auto& c : curves) {
    for (const auto& [d, f] : c.points) {
      csv::write_row(out, {std::to_string(c.amount), std::to_string(d), csv::format_fixed(f, 6)});
    }
  }
}

void write_cost_vs_length_csv(std::ostream& out, std::span<const LengthCost> rows) {
  out << "L,mean_cost_sat,median_cost_sat,success_rate\n";
  for (const auto& r : rows) {
    csv::write_row(out, {std::to_string(r.length), csv::format_fixed(r.mean_cost_sat, 3),
                         csv::format_fixed(r.median_cost_sat, 3), csv::format_fixed(r.success_rate(), 6)});
  }
}

}  // namespace lnsim
