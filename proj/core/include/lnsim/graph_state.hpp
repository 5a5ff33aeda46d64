#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lnsim/ingest.hpp"
#include "lnsim/rng.hpp"
#include "lnsim/types.hpp"

namespace lnsim {

/// Fee charged for forwarding `amount_sat` over an edge with `policy`:
/// base + floor(rate_ppm * amount_msat / 1e6), in millisatoshi.
Millisat edge_fee(const FeePolicy& policy, Satoshi amount_sat);

struct SimParams {
  std::int64_t tau = 7000;        // transactions per simulated day
  Satoshi amount = 60000;         // value of every transaction
  double epsilon = 0.8;           // share of merchant recipients
  int runs = 10;                  // independent repetitions per snapshot
  std::uint64_t seed = 0;         // master seed
  bool ignore_depletion = false;
  bool count_last_hop_fee = false;
  int max_hops = 20;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Spendable balance of every channel in both directions, for one run.
/// gamma(a->b) + gamma(b->a) == capacity holds for every channel at all times.
class BalanceState {
 public:
  /// `forward[c]` is the a->b balance of channel c; must lie in [0, capacity].
  BalanceState(const SnapshotGraph& graph, std::vector<Satoshi> forward, bool ignore_depletion = false);

  const SnapshotGraph& graph() const noexcept { return *graph_; }
  bool ignore_depletion() const noexcept { return ignore_depletion_; }

  Satoshi capacity(ChannelIndex c) const { return graph_->channel(c).capacity_sat; }
  Satoshi forward(ChannelIndex c) const { return forward_[c]; }
  Satoshi backward(ChannelIndex c) const { return capacity(c) - forward_[c]; }

  /// Balance spendable along the direction of edge e.
  Satoshi balance(EdgeIndex e) const {
    const auto& edge = graph_->edge(e);
    return edge.forward ? forward_[edge.channel] : capacity(edge.channel) - forward_[edge.channel];
  }

  /// True iff depletion is ignored or the direction holds at least `amount`.
  /// Says nothing about whether the edge is disabled.
  bool usable(EdgeIndex e, Satoshi amount) const {
    return ignore_depletion_ || balance(e) >= amount;
  }

  /// Moves `amount` along every edge of the path (forward balance down,
  /// reverse balance up). With depletion ignored balances stay untouched.
  /// Throws ContractViolation, without modifying anything, if an edge
  /// cannot carry the amount.
  void apply_payment(std::span<const EdgeIndex> path, Satoshi amount);

  /// Sum of all directed balances (constant: equals total capacity).
  Satoshi total_balance() const;

  std::span<const Satoshi> forward_balances() const noexcept { return forward_; }

 private:
  const SnapshotGraph* graph_;
  std::vector<Satoshi> forward_;
  bool ignore_depletion_;
};

/// Draws each channel's a->b balance uniformly from {0, ..., capacity}, in
/// channel order.
BalanceState init_balances(const SnapshotGraph& graph, Rng& rng, bool ignore_depletion = false);

inline bool usable(const BalanceState& state, EdgeIndex e, Satoshi amount) {
  return state.usable(e, amount);
}

}  // namespace lnsim
