#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lnsim/types.hpp"

namespace lnsim {

struct FeePolicy {
  Millisat base_fee_msat = 0;
  std::int64_t fee_rate_ppm = 0;
  bool disabled = false;

  friend bool operator==(const FeePolicy&, const FeePolicy&) = default;
};

/// Which endpoint's advertised policy a directed edge u->v carries.
/// kSource is the gossip convention (u's policy); kTarget swaps the two
/// directions of every channel so that u->v carries v's policy.
enum class PolicyConvention { kSource, kTarget };

/// One row of the canonical directed-edge table. A row with empty
/// channel_id and trg lists an isolated node (src).
struct CanonicalRow {
  std::string snapshot_id;
  std::string channel_id;
  std::string src;
  std::string trg;
  Satoshi capacity_sat = 0;
  FeePolicy policy;
  std::size_t line = 0;

  bool is_isolated_node() const { return channel_id.empty() && trg.empty(); }
};

inline constexpr std::string_view kCanonicalHeader =
    "snapshot_id,channel_id,src,trg,capacity_sat,base_fee_msat,fee_rate_ppm,disabled";

struct DirectedChannelEdge {
  ChannelIndex channel = 0;
  NodeIndex src = kNoNode;
  NodeIndex trg = kNoNode;
  Satoshi capacity_sat = 0;
  FeePolicy policy;
  /// True when src is the channel's first endpoint (node_a).
  bool forward = true;
};

/// A payment channel. node_a < node_b by index; the forward direction is
/// node_a -> node_b. Either direction may be missing from the graph (filtered
/// as disabled), but the channel keeps a balance for both.
struct Channel {
  std::string id;
  NodeIndex node_a = kNoNode;
  NodeIndex node_b = kNoNode;
  Satoshi capacity_sat = 0;
  EdgeIndex forward_edge = kNoEdge;
  EdgeIndex backward_edge = kNoEdge;
};

struct LoadOptions {
  /// Channels with capacity below this threshold are dropped (alpha).
  Satoshi min_capacity_sat = 0;
  bool keep_disabled = false;
  PolicyConvention convention = PolicyConvention::kSource;
};

/// Immutable directed multigraph of one daily snapshot. Node indices follow
/// lexicographic order of the node ids, so comparing index sequences compares
/// node-id sequences.
class SnapshotGraph {
 public:
  SnapshotGraph() = default;

  /// Builds and validates a graph from canonical rows belonging to one
  /// snapshot. Throws ValidationError on duplicate (channel, direction),
  /// self-loops, endpoint or capacity mismatch between the two directions.
  static SnapshotGraph from_rows(std::string snapshot_id, std::span<const CanonicalRow> rows,
                                 const LoadOptions& options, std::string_view source = "<rows>");

  const std::string& snapshot_id() const noexcept { return snapshot_id_; }
  std::size_t node_count() const noexcept { return node_ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t channel_count() const noexcept { return channels_.size(); }

  const std::string& node_id(NodeIndex n) const { return node_ids_.at(n); }
  const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }
  std::optional<NodeIndex> find_node(std::string_view id) const;

  const DirectedChannelEdge& edge(EdgeIndex e) const { return edges_[e]; }
  std::span<const DirectedChannelEdge> edges() const noexcept { return edges_; }
  const Channel& channel(ChannelIndex c) const { return channels_[c]; }
  std::span<const Channel> channels() const noexcept { return channels_; }
  const std::string& channel_id(EdgeIndex e) const { return channels_[edges_[e].channel].id; }

  /// Edges leaving n, ordered by (target, edge index).
  std::span<const EdgeIndex> out_edges(NodeIndex n) const {
    return {out_list_.data() + out_offset_[n], out_offset_[n + 1] - out_offset_[n]};
  }
  /// Edges entering n, ordered by (source, edge index).
  std::span<const EdgeIndex> in_edges(NodeIndex n) const {
    return {in_list_.data() + in_offset_[n], in_offset_[n + 1] - in_offset_[n]};
  }

  /// Number of channels adjacent to n with at least one surviving direction.
  std::size_t channel_degree(NodeIndex n) const { return channel_degree_[n]; }

  bool is_merchant(NodeIndex n) const { return merchant_[n] != 0; }
  std::span<const NodeIndex> merchants() const noexcept { return merchant_list_; }
  /// Flags the graph's nodes that appear in the merchant set; ids absent from
  /// this snapshot are ignored.
  void label_merchants(const std::set<std::string>& merchants);

  Satoshi total_capacity_sat() const;

  friend bool operator==(const SnapshotGraph& a, const SnapshotGraph& b);

 private:
  std::string snapshot_id_;
  std::vector<std::string> node_ids_;
  std::vector<DirectedChannelEdge> edges_;
  std::vector<Channel> channels_;
  std::vector<std::size_t> out_offset_, in_offset_;
  std::vector<EdgeIndex> out_list_, in_list_;
  std::vector<std::uint32_t> channel_degree_;
  std::vector<char> merchant_;
  std::vector<NodeIndex> merchant_list_;
};

/// Node id -> entity name. Unmapped nodes are their own singleton entity.
class EntityMap {
 public:
  EntityMap() = default;
  /// Throws ValidationError if a node is assigned to two different entities.
  void assign(const std::string& node, const std::string& entity);

  const std::string& entity_of(const std::string& node) const;
  bool contains(const std::string& node) const { return by_node_.count(node) != 0; }
  bool empty() const noexcept { return by_node_.empty(); }
  std::size_t size() const noexcept { return by_node_.size(); }

  /// Member node ids of an entity as listed in the map (a singleton entity
  /// named after an unmapped node yields just that node).
  std::vector<std::string> members(const std::string& entity) const;
  std::vector<std::string> entity_names() const;

 private:
  std::map<std::string, std::string> by_node_;
  std::map<std::string, std::set<std::string>> by_entity_;
};

struct EdgeStreamEvent {
  std::string channel_id;
  std::string src;
  std::string trg;
  Satoshi capacity_sat = 0;
  std::int64_t open_block = 0;
  std::optional<std::int64_t> close_block;
};

using MerchantSet = std::set<std::string>;

/// Reads canonical CSV rows (all snapshots in the file, in file order).
std::vector<CanonicalRow> read_canonical_csv(const std::string& path);
std::vector<CanonicalRow> parse_canonical_csv(std::string text, const std::string& name = "<memory>");

/// Loads one snapshot from a canonical CSV or a gossip dump (.json). Throws
/// ValidationError if a CSV holds more than one snapshot_id.
SnapshotGraph load_snapshot(const std::string& path, const LoadOptions& options);
SnapshotGraph load_snapshot(const std::string& path, Satoshi alpha, bool keep_disabled);

/// Loads every snapshot found at `path`: a single file (possibly holding
/// several snapshot ids, kept in first-appearance order) or a directory,
/// whose *.csv / *.json files are read in file-name order.
std::vector<SnapshotGraph> load_snapshots(const std::string& path, const LoadOptions& options);

/// Converts a node-client graph dump into canonical rows, one per channel
/// direction. A direction without a policy object becomes a disabled row.
/// Nodes without any channel are emitted as isolated-node rows.
std::vector<CanonicalRow> convert_gossip_dump(const std::string& path);
std::vector<CanonicalRow> convert_gossip_dump_text(const std::string& json_text,
                                                   const std::string& snapshot_id);

void write_canonical_csv(std::ostream& out, std::span<const CanonicalRow> rows);

MerchantSet load_merchants(const std::string& path);
EntityMap load_entities(const std::string& path);
/// Returned sorted by open_block (stable for equal blocks).
std::vector<EdgeStreamEvent> load_edge_stream(const std::string& path);

}  // namespace lnsim
