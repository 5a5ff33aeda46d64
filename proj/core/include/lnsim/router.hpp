#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lnsim/graph_state.hpp"
#include "lnsim/sampler.hpp"

namespace lnsim {

enum class PaymentStatus { kSuccess, kNoPath };

struct PaymentOutcome {
  Transaction transaction;
  PaymentStatus status = PaymentStatus::kNoPath;
  std::vector<NodeIndex> path;   // s = u0, ..., uk = t; empty on failure
  std::vector<EdgeIndex> edges;  // k edges
  Millisat total_fee_msat = 0;
  /// Fee credited to u1, ..., u(k-1).
  std::vector<Millisat> intermediary_fees;
  /// Fee credited to the recipient; non-zero only when the last hop is
  /// charged.
  Millisat recipient_fee_msat = 0;

  bool ok() const noexcept { return status == PaymentStatus::kSuccess; }
  int hop_count() const noexcept { return static_cast<int>(edges.size()); }
};

struct RouteOptions {
  bool count_last_hop_fee = false;
  int max_hops = 20;
  /// Optional node mask (size node_count); masked nodes are treated as
  /// removed from the graph.
  std::span<const char> excluded;

  static RouteOptions from(const SimParams& params) {
    RouteOptions o;
    o.count_last_hop_fee = params.count_last_hop_fee;
    o.max_hops = params.max_hops;
    return o;
  }
};

struct PathCost {
  Millisat total_msat = 0;
  std::vector<Millisat> intermediary_credits;
  Millisat recipient_credit = 0;
};

/// Fee accounting for a path given as an edge sequence: intermediary u_i is
/// credited the fee of the edge entering it; the edge into the recipient is
/// free unless `count_last_hop_fee`, in which case the recipient is credited.
/// Throws ContractViolation on unknown or disconnected edges.
PathCost path_cost(const SnapshotGraph& graph, std::span<const EdgeIndex> edges, Satoshi amount,
                   bool count_last_hop_fee);

/// Cheapest fee path search over usable (enabled, sufficiently funded)
/// edges. Ties break by fewer hops, then by the lexicographically smallest
/// node sequence; parallel channels resolve to the cheapest usable one, then
/// the lowest edge index. Keeps scratch buffers between queries, so one
/// Router per thread.
class Router {
 public:
  explicit Router(const SnapshotGraph& graph);

  PaymentOutcome route(const BalanceState& state, const Transaction& tx, const RouteOptions& options);

  PaymentOutcome route(const BalanceState& state, NodeIndex sender, NodeIndex recipient, Satoshi amount,
                       const RouteOptions& options) {
    return route(state, Transaction{sender, recipient, amount}, options);
  }

 private:
  struct Label {
    Millisat cost;
    std::uint32_t hops;
    friend bool operator==(const Label&, const Label&) = default;
    friend auto operator<=>(const Label&, const Label&) = default;
  };

  void refresh_fees(Satoshi amount);
  bool traversable(const BalanceState& state, EdgeIndex e, Satoshi amount, const RouteOptions& options) const;
  bool hop_limited_search(const BalanceState& state, const Transaction& tx, const RouteOptions& options,
                          PaymentOutcome& out);

  const SnapshotGraph* graph_;
  Satoshi fee_amount_ = -1;
  std::vector<Millisat> fee_cache_;
  std::vector<Label> label_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> settled_stamp_;
  std::uint32_t epoch_ = 0;
};

/// One-shot convenience over Router::route.
PaymentOutcome cheapest_path(const SnapshotGraph& graph, const BalanceState& state, NodeIndex sender,
                             NodeIndex recipient, Satoshi amount, const SimParams& params);

}  // namespace lnsim
