#include "lnsim/ingest.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "lnsim/csv.hpp"

namespace lnsim {
namespace fs = std::filesystem;

namespace {

struct DirectionDraft {
  const CanonicalRow* row = nullptr;
  FeePolicy policy;
};

struct ChannelDraft {
  std::string src;  // endpoint of the first row seen
  std::string trg;
  Satoshi capacity = 0;
  std::size_t first_line = 0;
  // [0]: src->trg of the first row, [1]: the reverse direction.
  DirectionDraft dir[2];
};

}  // namespace

std::optional<NodeIndex> SnapshotGraph::find_node(std::string_view id) const {
  const auto it = std::lower_bound(node_ids_.begin(), node_ids_.end(), id);
  if (it == node_ids_.end() || *it != id) return std::nullopt;
  return static_cast<NodeIndex>(it - node_ids_.begin());
}

void SnapshotGraph::label_merchants(const std::set<std::string>& merchants) {
  merchant_.assign(node_ids_.size(), 0);
  merchant_list_.clear();
  for (NodeIndex n = 0; n < node_ids_.size(); ++n) {
    if (merchants.count(node_ids_[n]) != 0) {
      merchant_[n] = 1;
      merchant_list_.push_back(n);
    }
  }
}

Satoshi SnapshotGraph::total_capacity_sat() const {
  Satoshi total = 0;
  for (const auto& c : channels_) total += c.capacity_sat;
  return total;
}

bool operator==(const SnapshotGraph& a, const SnapshotGraph& b) {
  if (a.snapshot_id_ != b.snapshot_id_ || a.node_ids_ != b.node_ids_ ||
      a.edges_.size() != b.edges_.size() || a.channels_.size() != b.channels_.size() ||
      a.merchant_ != b.merchant_) {
    return false;
  }
  for (std::size_t i = 0; i < a.edges_.size(); ++i) {
    const auto& x = a.edges_[i];
    const auto& y = b.edges_[i];
    if (std::tie(x.channel, x.src, x.trg, x.capacity_sat, x.forward) !=
            std::tie(y.channel, y.src, y.trg, y.capacity_sat, y.forward) ||
        !(x.policy == y.policy)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.channels_.size(); ++i) {
    const auto& x = a.channels_[i];
    const auto& y = b.channels_[i];
    if (std::tie(x.id, x.node_a, x.node_b, x.capacity_sat, x.forward_edge, x.backward_edge) !=
        std::tie(y.id, y.node_a, y.node_b, y.capacity_sat, y.forward_edge, y.backward_edge)) {
      return false;
    }
  }
  return true;
}

SnapshotGraph SnapshotGraph::from_rows(std::string snapshot_id, std::span<const CanonicalRow> rows,
                                       const LoadOptions& options, std::string_view source) {
  const auto invalid = [&](std::size_t line, const std::string& what) -> ValidationError {
    return ValidationError(fmt::format("{}:{}: {}", source, line, what));
  };

  std::map<std::string, ChannelDraft> drafts;
  std::set<std::string> isolated;
  for (const CanonicalRow& row : rows) {
    if (row.is_isolated_node()) {
      if (row.src.empty()) throw invalid(row.line, "isolated-node row without a node id");
      isolated.insert(row.src);
      continue;
    }
    if (row.channel_id.empty() || row.src.empty() || row.trg.empty()) {
      throw invalid(row.line, "row needs channel_id, src and trg");
    }
    if (row.src == row.trg) throw invalid(row.line, "self-loop channel " + row.channel_id);
    if (row.capacity_sat <= 0) throw invalid(row.line, "capacity_sat must be positive");
    if (row.policy.base_fee_msat < 0 || row.policy.fee_rate_ppm < 0) {
      throw invalid(row.line, "fee fields must be non-negative");
    }
    auto [it, inserted] = drafts.try_emplace(row.channel_id);
    ChannelDraft& d = it->second;
    int slot = 0;
    if (inserted) {
      d.src = row.src;
      d.trg = row.trg;
      d.capacity = row.capacity_sat;
      d.first_line = row.line;
    } else {
      if (row.src == d.src && row.trg == d.trg) {
        slot = 0;
      } else if (row.src == d.trg && row.trg == d.src) {
        slot = 1;
      } else {
        throw invalid(row.line, fmt::format("channel {} endpoints differ from line {}",
                                            row.channel_id, d.first_line));
      }
      if (row.capacity_sat != d.capacity) {
        throw invalid(row.line, fmt::format("channel {} capacity {} differs from {} on line {}",
                                            row.channel_id, row.capacity_sat, d.capacity,
                                            d.first_line));
      }
    }
    if (d.dir[slot].row != nullptr) {
      throw invalid(row.line, fmt::format("duplicate direction {}->{} of channel {} (line {})",
                                          row.src, row.trg, row.channel_id, d.dir[slot].row->line));
    }
    d.dir[slot].row = &row;
    d.dir[slot].policy = row.policy;
  }

  if (options.convention == PolicyConvention::kTarget) {
    for (auto& [id, d] : drafts) {
      // u->v takes v's advertisement; a direction whose counterpart was not
      // advertised at all is unusable.
      const FeePolicy missing{0, 0, true};
      const FeePolicy fwd = d.dir[1].row ? d.dir[1].policy : missing;
      const FeePolicy bwd = d.dir[0].row ? d.dir[0].policy : missing;
      d.dir[0].policy = fwd;
      d.dir[1].policy = bwd;
    }
  }

  // Surviving channels and their endpoints.
  struct Kept {
    const std::string* id;
    const ChannelDraft* draft;
    bool keep[2];
  };
  std::vector<Kept> kept;
  std::set<std::string> names = isolated;
  for (const auto& [id, d] : drafts) {
    if (d.capacity < options.min_capacity_sat) continue;
    Kept k{&id, &d, {false, false}};
    for (int s = 0; s < 2; ++s) {
      const bool present = d.dir[s].row != nullptr || options.convention == PolicyConvention::kTarget;
      k.keep[s] = present && (options.keep_disabled || !d.dir[s].policy.disabled);
    }
    if (!k.keep[0] && !k.keep[1]) continue;
    names.insert(d.src);
    names.insert(d.trg);
    kept.push_back(k);
  }

  SnapshotGraph g;
  g.snapshot_id_ = std::move(snapshot_id);
  g.node_ids_.assign(names.begin(), names.end());
  const auto index_of = [&](const std::string& id) { return *g.find_node(id); };

  // Channels ordered by id (map order), so balance draws do not depend on row
  // order in the file.
  for (const Kept& k : kept) {
    const NodeIndex s = index_of(k.draft->src);
    const NodeIndex t = index_of(k.draft->trg);
    Channel c;
    c.id = *k.id;
    c.node_a = std::min(s, t);
    c.node_b = std::max(s, t);
    c.capacity_sat = k.draft->capacity;
    const auto ci = static_cast<ChannelIndex>(g.channels_.size());
    g.channels_.push_back(c);
    for (int slot = 0; slot < 2; ++slot) {
      if (!k.keep[slot]) continue;
      DirectedChannelEdge e;
      e.channel = ci;
      e.src = slot == 0 ? s : t;
      e.trg = slot == 0 ? t : s;
      e.capacity_sat = k.draft->capacity;
      e.policy = k.draft->dir[slot].policy;
      e.forward = e.src == c.node_a;
      g.edges_.push_back(e);
    }
  }
  std::stable_sort(g.edges_.begin(), g.edges_.end(), [&](const auto& a, const auto& b) {
    return std::tie(a.src, a.trg, g.channels_[a.channel].id) <
           std::tie(b.src, b.trg, g.channels_[b.channel].id);
  });
  for (EdgeIndex e = 0; e < g.edges_.size(); ++e) {
    const auto& edge = g.edges_[e];
    auto& c = g.channels_[edge.channel];
    (edge.forward ? c.forward_edge : c.backward_edge) = e;
  }

  const std::size_t n = g.node_ids_.size();
  g.out_offset_.assign(n + 1, 0);
  g.in_offset_.assign(n + 1, 0);
  for (const auto& e : g.edges_) {
    ++g.out_offset_[e.src + 1];
    ++g.in_offset_[e.trg + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    g.out_offset_[i + 1] += g.out_offset_[i];
    g.in_offset_[i + 1] += g.in_offset_[i];
  }
  g.out_list_.resize(g.edges_.size());
  g.in_list_.resize(g.edges_.size());
  {
    auto out_pos = g.out_offset_;
    auto in_pos = g.in_offset_;
    // Edges are sorted by (src, trg, id): out lists come out ordered by
    // target. In lists need a separate ordering by source.
    for (EdgeIndex e = 0; e < g.edges_.size(); ++e) g.out_list_[out_pos[g.edges_[e].src]++] = e;
    std::vector<EdgeIndex> by_trg(g.edges_.size());
    for (EdgeIndex e = 0; e < by_trg.size(); ++e) by_trg[e] = e;
    std::stable_sort(by_trg.begin(), by_trg.end(), [&](EdgeIndex a, EdgeIndex b) {
      return std::tie(g.edges_[a].trg, g.edges_[a].src) < std::tie(g.edges_[b].trg, g.edges_[b].src);
    });
    for (const EdgeIndex e : by_trg) g.in_list_[in_pos[g.edges_[e].trg]++] = e;
  }

  g.channel_degree_.assign(n, 0);
  for (const auto& c : g.channels_) {
    ++g.channel_degree_[c.node_a];
    ++g.channel_degree_[c.node_b];
  }
  g.merchant_.assign(n, 0);
  return g;
}

// --- entity map -------------------------------------------------------------

void EntityMap::assign(const std::string& node, const std::string& entity) {
  auto [it, inserted] = by_node_.try_emplace(node, entity);
  if (!inserted && it->second != entity) {
    throw ValidationError(fmt::format("node {} mapped to both '{}' and '{}'", node, it->second, entity));
  }
  by_entity_[entity].insert(node);
}

const std::string& EntityMap::entity_of(const std::string& node) const {
  const auto it = by_node_.find(node);
  return it == by_node_.end() ? node : it->second;
}

std::vector<std::string> EntityMap::members(const std::string& entity) const {
  const auto it = by_entity_.find(entity);
  if (it != by_entity_.end()) return {it->second.begin(), it->second.end()};
  if (by_node_.count(entity) == 0) return {entity};
  return {};
}

std::vector<std::string> EntityMap::entity_names() const {
  std::vector<std::string> out;
  out.reserve(by_entity_.size());
  for (const auto& [name, _] : by_entity_) out.push_back(name);
  return out;
}

// --- canonical CSV ----------------------------------------------------------

namespace {

std::vector<CanonicalRow> rows_from_reader(const csv::Reader& r) {
  const std::size_t c_snap = r.column("snapshot_id");
  const std::size_t c_chan = r.column("channel_id");
  const std::size_t c_src = r.column("src");
  const std::size_t c_trg = r.column("trg");
  const std::size_t c_cap = r.column("capacity_sat");
  const std::size_t c_base = r.column("base_fee_msat");
  const std::size_t c_rate = r.column("fee_rate_ppm");
  const std::size_t c_dis = r.column("disabled");

  std::vector<CanonicalRow> rows;
  rows.reserve(r.records().size());
  for (const auto& rec : r.records()) {
    CanonicalRow row;
    row.line = rec.line;
    row.snapshot_id = rec.fields[c_snap];
    row.channel_id = rec.fields[c_chan];
    row.src = rec.fields[c_src];
    row.trg = rec.fields[c_trg];
    if (row.src.empty()) r.fail(rec.line, "empty src");
    if (row.is_isolated_node()) {
      rows.push_back(std::move(row));
      continue;
    }
    row.capacity_sat = r.parse_int(rec, c_cap, "capacity_sat");
    row.policy.base_fee_msat = r.parse_int(rec, c_base, "base_fee_msat");
    row.policy.fee_rate_ppm = r.parse_int(rec, c_rate, "fee_rate_ppm");
    row.policy.disabled = r.parse_bool(rec, c_dis, "disabled");
    rows.push_back(std::move(row));
  }
  return rows;
}

bool is_json(const std::string& path) {
  return fs::path(path).extension() == ".json";
}

std::vector<std::pair<std::string, std::vector<CanonicalRow>>> group_by_snapshot(
    std::vector<CanonicalRow> rows) {
  std::vector<std::pair<std::string, std::vector<CanonicalRow>>> groups;
  std::unordered_map<std::string, std::size_t> pos;
  for (auto& row : rows) {
    auto [it, inserted] = pos.try_emplace(row.snapshot_id, groups.size());
    if (inserted) groups.emplace_back(row.snapshot_id, std::vector<CanonicalRow>{});
    groups[it->second].second.push_back(std::move(row));
  }
  return groups;
}

std::vector<CanonicalRow> read_any(const std::string& path) {
  return is_json(path) ? convert_gossip_dump(path) : read_canonical_csv(path);
}

}  // namespace

std::vector<CanonicalRow> read_canonical_csv(const std::string& path) {
  return rows_from_reader(csv::Reader::open(path));
}

std::vector<CanonicalRow> parse_canonical_csv(std::string text, const std::string& name) {
  return rows_from_reader(csv::Reader::from_string(std::move(text), name));
}

SnapshotGraph load_snapshot(const std::string& path, const LoadOptions& options) {
  auto groups = group_by_snapshot(read_any(path));
  if (groups.size() > 1) {
    throw ValidationError(fmt::format("{}: holds {} snapshots, expected one", path, groups.size()));
  }
  if (groups.empty()) return SnapshotGraph::from_rows(fs::path(path).stem().string(), {}, options, path);
  return SnapshotGraph::from_rows(groups[0].first, groups[0].second, options, path);
}

SnapshotGraph load_snapshot(const std::string& path, Satoshi alpha, bool keep_disabled) {
  LoadOptions options;
  options.min_capacity_sat = alpha;
  options.keep_disabled = keep_disabled;
  return load_snapshot(path, options);
}

std::vector<SnapshotGraph> load_snapshots(const std::string& path, const LoadOptions& options) {
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".csv" || ext == ".json")) files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw ParseError(path, 0, "no such file or directory");
  }
  std::vector<SnapshotGraph> out;
  for (const auto& file : files) {
    for (auto& [id, rows] : group_by_snapshot(read_any(file))) {
      out.push_back(SnapshotGraph::from_rows(id, rows, options, file));
    }
  }
  return out;
}

void write_canonical_csv(std::ostream& out, std::span<const CanonicalRow> rows) {
  out << kCanonicalHeader << '\n';
  for (const auto& row : rows) {
    if (row.is_isolated_node()) {
      csv::write_row(out, {row.snapshot_id, "", row.src, "", "", "", "", ""});
      continue;
    }
    csv::write_row(out, {row.snapshot_id, row.channel_id, row.src, row.trg,
                         std::to_string(row.capacity_sat), std::to_string(row.policy.base_fee_msat),
                         std::to_string(row.policy.fee_rate_ppm), row.policy.disabled ? "1" : "0"});
  }
}

// --- labels and edge stream -------------------------------------------------

MerchantSet load_merchants(const std::string& path) {
  const auto r = csv::Reader::open(path);
  const std::size_t c_key = r.column("pub_key");
  MerchantSet out;
  for (const auto& rec : r.records()) {
    if (rec.fields[c_key].empty()) r.fail(rec.line, "empty pub_key");
    out.insert(rec.fields[c_key]);
  }
  return out;
}

EntityMap load_entities(const std::string& path) {
  const auto r = csv::Reader::open(path);
  const std::size_t c_key = r.column("pub_key");
  const std::size_t c_name = r.column("entity_name");
  EntityMap out;
  for (const auto& rec : r.records()) {
    if (rec.fields[c_key].empty() || rec.fields[c_name].empty()) r.fail(rec.line, "empty pub_key or entity_name");
    try {
      out.assign(rec.fields[c_key], rec.fields[c_name]);
    } catch (const ValidationError& e) {
      r.fail(rec.line, e.what());
    }
  }
  return out;
}

std::vector<EdgeStreamEvent> load_edge_stream(const std::string& path) {
  const auto r = csv::Reader::open(path);
  const std::size_t c_chan = r.column("channel_id");
  const std::size_t c_src = r.column("src");
  const std::size_t c_trg = r.column("trg");
  const std::size_t c_cap = r.column("capacity_sat");
  const std::size_t c_open = r.column("open_block");
  const std::size_t c_close = r.column("close_block");
  std::vector<EdgeStreamEvent> out;
  out.reserve(r.records().size());
  for (const auto& rec : r.records()) {
    EdgeStreamEvent ev;
    ev.channel_id = rec.fields[c_chan];
    ev.src = rec.fields[c_src];
    ev.trg = rec.fields[c_trg];
    if (ev.src.empty() || ev.trg.empty()) r.fail(rec.line, "empty endpoint");
    ev.capacity_sat = r.parse_int(rec, c_cap, "capacity_sat");
    ev.open_block = r.parse_int(rec, c_open, "open_block");
    ev.close_block = r.parse_optional_int(rec, c_close, "close_block");
    if (ev.close_block && *ev.close_block < ev.open_block) {
      throw ValidationError(fmt::format("{}:{}: close_block {} precedes open_block {}", path, rec.line,
                                        *ev.close_block, ev.open_block));
    }
    out.push_back(std::move(ev));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.open_block < b.open_block; });
  return out;
}

}  // namespace lnsim
