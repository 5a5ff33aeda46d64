#include "lnsim/graph_state.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace lnsim {

Millisat edge_fee(const FeePolicy& policy, Satoshi amount_sat) {
  const auto amount_msat = static_cast<unsigned __int128>(to_msat(amount_sat));
  const auto proportional = static_cast<unsigned __int128>(policy.fee_rate_ppm) * amount_msat / 1'000'000u;
  return policy.base_fee_msat + static_cast<Millisat>(proportional);
}

void SimParams::validate() const {
  if (tau < 0) throw std::invalid_argument("tau must be non-negative");
  if (amount <= 0) throw std::invalid_argument("amount must be positive");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("merchant ratio must lie in [0, 1]");
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (max_hops < 1) throw std::invalid_argument("max_hops must be at least 1");
}

BalanceState::BalanceState(const SnapshotGraph& graph, std::vector<Satoshi> forward, bool ignore_depletion)
    : graph_(&graph), forward_(std::move(forward)), ignore_depletion_(ignore_depletion) {
  if (forward_.size() != graph.channel_count()) {
    throw ContractViolation("balance vector does not match the channel count");
  }
  for (ChannelIndex c = 0; c < forward_.size(); ++c) {
    if (forward_[c] < 0 || forward_[c] > capacity(c)) {
      throw ContractViolation(fmt::format("balance {} outside [0, {}] on channel {}", forward_[c],
                                          capacity(c), graph.channel(c).id));
    }
  }
}

void BalanceState::apply_payment(std::span<const EdgeIndex> path, Satoshi amount) {
  if (amount <= 0) throw ContractViolation("payment amount must be positive");
  if (ignore_depletion_) return;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= graph_->edge_count()) throw ContractViolation("path references an unknown edge");
    if (balance(path[i]) < amount) {
      throw ContractViolation(fmt::format("edge {} of channel {} holds {} < {}", i,
                                          graph_->channel_id(path[i]), balance(path[i]), amount));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (graph_->edge(path[j]).channel == graph_->edge(path[i]).channel) {
        throw ContractViolation("path uses a channel twice");
      }
    }
  }
  for (const EdgeIndex e : path) {
    const auto& edge = graph_->edge(e);
    forward_[edge.channel] += edge.forward ? -amount : amount;
  }
}

Satoshi BalanceState::total_balance() const {
  Satoshi total = 0;
  for (ChannelIndex c = 0; c < forward_.size(); ++c) total += forward_[c] + backward(c);
  return total;
}

BalanceState init_balances(const SnapshotGraph& graph, Rng& rng, bool ignore_depletion) {
  std::vector<Satoshi> forward(graph.channel_count());
  for (ChannelIndex c = 0; c < forward.size(); ++c) {
    forward[c] = rng.uniform_int(0, graph.channel(c).capacity_sat);
  }
  return BalanceState(graph, std::move(forward), ignore_depletion);
}

}  // namespace lnsim
