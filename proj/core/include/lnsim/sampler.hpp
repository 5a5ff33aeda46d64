#pragma once

#include <vector>

#include "lnsim/graph_state.hpp"
#include "lnsim/ingest.hpp"
#include "lnsim/rng.hpp"

namespace lnsim {

struct Transaction {
  NodeIndex sender = kNoNode;
  NodeIndex recipient = kNoNode;
  Satoshi amount = 0;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Samples one day of `params.tau` transactions on `graph`.
///
/// Senders are drawn uniformly (with replacement) from all graph nodes first,
/// so the sender multiset does not depend on epsilon. Then floor(eps * tau)
/// recipients are drawn from the graph's merchants proportionally to their
/// channel degree, and the remaining recipients uniformly from all nodes.
/// Recipients are shuffled against the sender list; a recipient equal to its
/// sender is redrawn from its own pool until they differ. When no merchant
/// with positive degree is present, merchant draws fall back to uniform.
///
/// Throws std::invalid_argument if tau > 0 and the graph has fewer than two
/// nodes.
std::vector<Transaction> sample_transactions(const SnapshotGraph& graph, const SimParams& params, Rng& rng);

}  // namespace lnsim
