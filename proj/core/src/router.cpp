#include "lnsim/router.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

#include <fmt/format.h>

namespace lnsim {

PathCost path_cost(const SnapshotGraph& graph, std::span<const EdgeIndex> edges, Satoshi amount,
                   bool count_last_hop_fee) {
  PathCost cost;
  if (edges.empty()) return cost;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i] >= graph.edge_count()) throw ContractViolation("path references an unknown edge");
    if (i > 0 && graph.edge(edges[i - 1]).trg != graph.edge(edges[i]).src) {
      throw ContractViolation(fmt::format("path edges {} and {} are not adjacent", i - 1, i));
    }
  }
  cost.intermediary_credits.reserve(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const Millisat fee = edge_fee(graph.edge(edges[i]).policy, amount);
    cost.intermediary_credits.push_back(fee);
    cost.total_msat += fee;
  }
  if (count_last_hop_fee) {
    cost.recipient_credit = edge_fee(graph.edge(edges.back()).policy, amount);
    cost.total_msat += cost.recipient_credit;
  }
  return cost;
}

Router::Router(const SnapshotGraph& graph)
    : graph_(&graph),
      label_(graph.node_count()),
      stamp_(graph.node_count(), 0),
      settled_stamp_(graph.node_count(), 0) {}

void Router::refresh_fees(Satoshi amount) {
  if (amount == fee_amount_) return;
  fee_cache_.resize(graph_->edge_count());
  for (EdgeIndex i = 0; i < fee_cache_.size(); ++i) fee_cache_[i] = edge_fee(graph_->edge(i).policy, amount);
  fee_amount_ = amount;
}

bool Router::traversable(const BalanceState& state, EdgeIndex e, Satoshi amount,
                         const RouteOptions& options) const {
  const auto& edge = graph_->edge(e);
  if (edge.policy.disabled) return false;
  if (!options.excluded.empty() && (options.excluded[edge.src] != 0 || options.excluded[edge.trg] != 0)) {
    return false;
  }
  return state.usable(e, amount);
}

PaymentOutcome Router::route(const BalanceState& state, const Transaction& tx, const RouteOptions& options) {
  if (&state.graph() != graph_) throw ContractViolation("balance state belongs to another graph");
  if (tx.sender >= graph_->node_count() || tx.recipient >= graph_->node_count()) {
    throw ContractViolation("transaction endpoint outside the graph");
  }
  if (tx.sender == tx.recipient) throw ContractViolation("sender and recipient must differ");

  PaymentOutcome out;
  out.transaction = tx;
  if (!options.excluded.empty() && (options.excluded[tx.sender] != 0 || options.excluded[tx.recipient] != 0)) {
    return out;
  }

  const NodeIndex s = tx.sender;
  const NodeIndex t = tx.recipient;
  const Satoshi amount = tx.amount;
  refresh_fees(amount);

  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    std::fill(settled_stamp_.begin(), settled_stamp_.end(), 0);
    epoch_ = 1;
  }
  const auto edge_cost = [&](EdgeIndex e) -> Millisat {
    return graph_->edge(e).trg == t && !options.count_last_hop_fee ? 0 : fee_cache_[e];
  };

  // Label-setting search backwards from the recipient: label_[v] is the best
  // (cost, hops) from v to t. Stops once the sender is settled.
  using Entry = std::pair<Label, NodeIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  label_[t] = {0, 0};
  stamp_[t] = epoch_;
  queue.push({label_[t], t});
  bool reached = false;
  while (!queue.empty()) {
    const auto [lab, v] = queue.top();
    queue.pop();
    if (settled_stamp_[v] == epoch_ || lab != label_[v]) continue;
    settled_stamp_[v] = epoch_;
    if (v == s) {
      reached = true;
      break;
    }
    for (const EdgeIndex e : graph_->in_edges(v)) {
      const NodeIndex u = graph_->edge(e).src;
      if (settled_stamp_[u] == epoch_ || !traversable(state, e, amount, options)) continue;
      const Label cand{lab.cost + edge_cost(e), lab.hops + 1};
      if (stamp_[u] != epoch_ || cand < label_[u]) {
        stamp_[u] = epoch_;
        label_[u] = cand;
        queue.push({cand, u});
      }
    }
  }
  if (!reached) return out;

  if (label_[s].hops > static_cast<std::uint32_t>(options.max_hops)) {
    hop_limited_search(state, tx, options, out);
    return out;
  }

  // Forward greedy walk: the first out-edge (ordered by target) that stays on
  // an optimal path yields the lexicographically smallest optimal sequence.
  out.path.push_back(s);
  NodeIndex u = s;
  while (u != t) {
    EdgeIndex chosen = kNoEdge;
    for (const EdgeIndex e : graph_->out_edges(u)) {
      const NodeIndex w = graph_->edge(e).trg;
      if (settled_stamp_[w] != epoch_ || !traversable(state, e, amount, options)) continue;
      const Label via{label_[w].cost + edge_cost(e), label_[w].hops + 1};
      if (via == label_[u]) {
        chosen = e;
        break;
      }
    }
    if (chosen == kNoEdge) throw ContractViolation("router invariant broken: no optimal successor");
    out.edges.push_back(chosen);
    u = graph_->edge(chosen).trg;
    out.path.push_back(u);
  }

  const PathCost cost = path_cost(*graph_, out.edges, amount, options.count_last_hop_fee);
  out.status = PaymentStatus::kSuccess;
  out.total_fee_msat = cost.total_msat;
  out.intermediary_fees = cost.intermediary_credits;
  out.recipient_fee_msat = cost.recipient_credit;
  return out;
}

bool Router::hop_limited_search(const BalanceState& state, const Transaction& tx, const RouteOptions& options,
                                PaymentOutcome& out) {
  // Exact fallback when the unconstrained optimum is longer than the hop cap:
  // best[h][v] is the cheapest walk from v to t with exactly h hops. The
  // (cost, hops)-optimal walk within the cap is always a simple path.
  constexpr Millisat kInf = std::numeric_limits<Millisat>::max();
  const NodeIndex s = tx.sender;
  const NodeIndex t = tx.recipient;
  const auto n = graph_->node_count();
  const auto cap = static_cast<std::size_t>(options.max_hops);
  const auto edge_cost = [&](EdgeIndex e) -> Millisat {
    return graph_->edge(e).trg == t && !options.count_last_hop_fee ? 0 : fee_cache_[e];
  };

  std::vector<std::vector<Millisat>> best(cap + 1, std::vector<Millisat>(n, kInf));
  best[0][t] = 0;
  for (std::size_t h = 1; h <= cap; ++h) {
    for (EdgeIndex e = 0; e < graph_->edge_count(); ++e) {
      const auto& edge = graph_->edge(e);
      if (best[h - 1][edge.trg] == kInf || !traversable(state, e, tx.amount, options)) continue;
      const Millisat c = best[h - 1][edge.trg] + edge_cost(e);
      if (c < best[h][edge.src]) best[h][edge.src] = c;
    }
  }
  std::size_t hops = 0;
  for (std::size_t h = 1; h <= cap; ++h) {
    if (best[h][s] != kInf && (hops == 0 || best[h][s] < best[hops][s])) hops = h;
  }
  if (hops == 0) return false;

  out.path.push_back(s);
  NodeIndex u = s;
  for (std::size_t h = hops; h > 0; --h) {
    EdgeIndex chosen = kNoEdge;
    for (const EdgeIndex e : graph_->out_edges(u)) {
      const NodeIndex w = graph_->edge(e).trg;
      if (best[h - 1][w] == kInf || !traversable(state, e, tx.amount, options)) continue;
      if (best[h - 1][w] + edge_cost(e) == best[h][u]) {
        chosen = e;
        break;
      }
    }
    if (chosen == kNoEdge) throw ContractViolation("router invariant broken in hop-limited search");
    out.edges.push_back(chosen);
    u = graph_->edge(chosen).trg;
    out.path.push_back(u);
  }
  const PathCost cost = path_cost(*graph_, out.edges, tx.amount, options.count_last_hop_fee);
  out.status = PaymentStatus::kSuccess;
  out.total_fee_msat = cost.total_msat;
  out.intermediary_fees = cost.intermediary_credits;
  out.recipient_fee_msat = cost.recipient_credit;
  return true;
}

PaymentOutcome cheapest_path(const SnapshotGraph& graph, const BalanceState& state, NodeIndex sender,
                             NodeIndex recipient, Satoshi amount, const SimParams& params) {
  Router router(graph);
  return router.route(state, sender, recipient, amount, RouteOptions::from(params));
}

}  // namespace lnsim
