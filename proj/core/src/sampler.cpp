#include "lnsim/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace lnsim {
namespace {

class DegreeSampler {
 public:
  explicit DegreeSampler(const SnapshotGraph& graph) {
    for (const NodeIndex m : graph.merchants()) {
      const auto d = graph.channel_degree(m);
      if (d == 0) continue;
      total_ += d;
      nodes_.push_back(m);
      cumulative_.push_back(total_);
    }
  }

  bool empty() const { return total_ == 0; }

  NodeIndex draw(Rng& rng) const {
    const std::uint64_t x = rng.uniform_below(total_);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    return nodes_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

  /// Whether a node other than `n` can be drawn.
  bool has_other_than(NodeIndex n) const {
    return std::any_of(nodes_.begin(), nodes_.end(), [n](NodeIndex m) { return m != n; });
  }

 private:
  std::vector<NodeIndex> nodes_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
};

}  // namespace

std::vector<Transaction> sample_transactions(const SnapshotGraph& graph, const SimParams& params, Rng& rng) {
  params.validate();
  const auto tau = static_cast<std::size_t>(params.tau);
  if (tau == 0) return {};
  const std::uint64_t n = graph.node_count();
  if (n < 2) throw std::invalid_argument("cannot sample transactions on a graph with fewer than two nodes");

  std::vector<Transaction> txs(tau);
  for (auto& tx : txs) {
    tx.sender = static_cast<NodeIndex>(rng.uniform_below(n));
    tx.amount = params.amount;
  }

  const DegreeSampler merchants(graph);
  const auto merchant_draws = static_cast<std::size_t>(std::floor(params.epsilon * static_cast<double>(tau)));
  if (merchant_draws > 0 && merchants.empty()) {
    spdlog::warn("snapshot {}: no merchant with channels present, merchant recipients drawn uniformly",
                 graph.snapshot_id());
  }

  struct Draw {
    NodeIndex node;
    bool merchant;
  };
  std::vector<Draw> recipients(tau);
  for (std::size_t i = 0; i < tau; ++i) {
    const bool merchant = i < merchant_draws && !merchants.empty();
    recipients[i] = {merchant ? merchants.draw(rng) : static_cast<NodeIndex>(rng.uniform_below(n)), merchant};
  }
  rng.shuffle(std::span<Draw>(recipients));

  for (std::size_t i = 0; i < tau; ++i) {
    Draw& r = recipients[i];
    const NodeIndex sender = txs[i].sender;
    if (r.node == sender && r.merchant && !merchants.has_other_than(sender)) r.merchant = false;
    while (r.node == sender) {
      r.node = r.merchant ? merchants.draw(rng) : static_cast<NodeIndex>(rng.uniform_below(n));
    }
    txs[i].recipient = r.node;
  }
  return txs;
}

}  // namespace lnsim
