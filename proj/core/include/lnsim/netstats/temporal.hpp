#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lnsim/ingest.hpp"
#include "lnsim/netstats/structure.hpp"

namespace lnsim::netstats {

/// Graph metrics of the channels alive at the end of each window of
/// `block_window` blocks, starting at the first opening. A channel is alive
/// at block b when open_block <= b and it has not closed by b.
/// Throws std::invalid_argument on a non-positive window.
std::vector<GraphMetrics> temporal_metrics(std::span<const EdgeStreamEvent> stream, std::int64_t block_window,
                                           int workers = 1);

/// Distance histogram; key -1 stands for "not connected".
struct LocalityHistogram {
  std::map<int, std::int64_t> all;
  std::map<int, std::int64_t> merchant;  // events with a merchant endpoint

  static std::int64_t total(const std::map<int, std::int64_t>& h);
};

/// For each opening, the hop distance between its endpoints in the graph of
/// channels opened strictly earlier and still alive. Requires the stream in
/// open_block order.
LocalityHistogram edge_locality(std::span<const EdgeStreamEvent> stream, const MerchantSet& merchants = {});

void write_locality_csv(std::ostream& out, const LocalityHistogram& h);

struct ChannelLifetime {
  std::string channel_id;
  std::int64_t open_block = 0;
  std::int64_t lifetime = 0;
  bool censored = false;  // still open at the last observed block
  bool merchant = false;
};

struct NodeLifetime {
  std::string node;
  std::int64_t first_block = 0;
  std::int64_t lifetime = 0;
  bool censored = false;
  bool merchant = false;
};

struct LifetimeSummary {
  std::vector<ChannelLifetime> channels;
  std::vector<NodeLifetime> nodes;
  std::int64_t last_block = 0;
  std::optional<double> mean_channel;
  std::optional<double> mean_merchant_channel;
  std::optional<double> mean_node;
  std::optional<double> mean_merchant_node;
};

/// Channel lifetime is close - open, censored at the last block seen in the
/// stream. A node lives from its first opening to the last close of its
/// channels (censored while any is open).
LifetimeSummary lifetimes(std::span<const EdgeStreamEvent> stream, const MerchantSet& merchants = {});

void write_lifetimes_csv(std::ostream& out, const LifetimeSummary& s);

struct AttachmentPoint {
  std::size_t degree = 0;
  std::int64_t endpoint_events = 0;  // openings where an endpoint had this degree
  double exposure = 0;               // sum over openings of nodes holding this degree
  std::optional<double> probability;
};

/// Chance that a node of a given alive-channel degree is an endpoint of the
/// next opening. Degree 0 only counts endpoint events: the pool of future
/// nodes is unknown.
std::vector<AttachmentPoint> attachment_curve(std::span<const EdgeStreamEvent> stream);

void write_attachment_csv(std::ostream& out, std::span<const AttachmentPoint> curve);

}  // namespace lnsim::netstats
