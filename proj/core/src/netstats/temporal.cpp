#include "lnsim/netstats/temporal.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "lnsim/csv.hpp"

namespace lnsim::netstats {

namespace {

class NodeInterner {
 public:
  std::uint32_t id(const std::string& key) {
    const auto [it, inserted] = ids_.try_emplace(key, static_cast<std::uint32_t>(ids_.size()));
    return it->second;
  }
  std::size_t size() const { return ids_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Interned {
  std::vector<std::uint32_t> src, trg;
  std::size_t nodes = 0;
};

Interned intern(std::span<const EdgeStreamEvent> stream) {
  NodeInterner ids;
  Interned out;
  for (const auto& e : stream) {
    out.src.push_back(ids.id(e.src));
    out.trg.push_back(ids.id(e.trg));
  }
  out.nodes = ids.size();
  return out;
}

void require_sorted(std::span<const EdgeStreamEvent> stream) {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].open_block < stream[i - 1].open_block) {
      throw std::invalid_argument("edge stream must be ordered by open_block");
    }
  }
}

// Multigraph under insertions and deletions.
class DynamicGraph {
 public:
  explicit DynamicGraph(std::size_t nodes) : adj_(nodes), seen_a_(nodes, 0), seen_b_(nodes, 0), dist_a_(nodes), dist_b_(nodes) {}

  void add(std::uint32_t u, std::uint32_t v) {
    ++adj_[u][v];
    ++adj_[v][u];
  }
  void remove(std::uint32_t u, std::uint32_t v) {
    drop(u, v);
    drop(v, u);
  }
  std::size_t degree(std::uint32_t v) const { return adj_[v].size(); }

  /// Hop distance, or -1 when not connected. Bidirectional breadth-first
  /// search expanding the smaller frontier one full level at a time.
  int distance(std::uint32_t s, std::uint32_t t) {
    if (s == t) return 0;
    if (adj_[s].empty() || adj_[t].empty()) return -1;
    ++epoch_;
    std::vector<std::uint32_t> fa{s}, fb{t};
    seen_a_[s] = epoch_;
    dist_a_[s] = 0;
    seen_b_[t] = epoch_;
    dist_b_[t] = 0;
    while (!fa.empty() && !fb.empty()) {
      const bool from_a = fa.size() <= fb.size();
      auto& frontier = from_a ? fa : fb;
      auto& seen = from_a ? seen_a_ : seen_b_;
      auto& dist = from_a ? dist_a_ : dist_b_;
      const auto& other_seen = from_a ? seen_b_ : seen_a_;
      const auto& other_dist = from_a ? dist_b_ : dist_a_;
      int best = -1;
      std::vector<std::uint32_t> next;
      for (const auto v : frontier) {
        for (const auto& [w, _] : adj_[v]) {
          if (other_seen[w] == epoch_) {
            const int d = dist[v] + 1 + other_dist[w];
            if (best < 0 || d < best) best = d;
          }
          if (seen[w] == epoch_) continue;
          seen[w] = epoch_;
          dist[w] = dist[v] + 1;
          next.push_back(w);
        }
      }
      if (best >= 0) return best;
      frontier.swap(next);
    }
    return -1;
  }

 private:
  void drop(std::uint32_t u, std::uint32_t v) {
    auto it = adj_[u].find(v);
    if (it == adj_[u].end()) throw std::logic_error("removing a missing channel");
    if (--it->second == 0) adj_[u].erase(it);
  }

  std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> adj_;
  std::vector<std::uint32_t> seen_a_, seen_b_;
  std::vector<int> dist_a_, dist_b_;
  std::uint32_t epoch_ = 0;
};

using CloseQueue = std::priority_queue<std::pair<std::int64_t, std::size_t>,
                                       std::vector<std::pair<std::int64_t, std::size_t>>, std::greater<>>;

}  // namespace

std::vector<GraphMetrics> temporal_metrics(std::span<const EdgeStreamEvent> stream, std::int64_t block_window,
                                           int workers) {
  if (block_window <= 0) throw std::invalid_argument("block window must be positive");
  require_sorted(stream);
  std::vector<GraphMetrics> out;
  if (stream.empty()) return out;
  const Interned ids = intern(stream);
  std::int64_t last = stream.back().open_block;
  for (const auto& e : stream) {
    if (e.close_block) last = std::max(last, *e.close_block);
  }
  const std::int64_t start = stream.front().open_block;
  for (std::int64_t end = start + block_window;; end += block_window) {
    const std::int64_t at = std::min(end, last);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t i = 0; i < stream.size() && stream[i].open_block <= at; ++i) {
      if (stream[i].close_block && *stream[i].close_block <= at) continue;
      edges.emplace_back(ids.src[i], ids.trg[i]);
    }
    const SimpleGraph g(ids.nodes, edges, false);
    out.push_back(graph_metrics(std::to_string(at), g, edges.size(), workers));
    if (end >= last) break;
  }
  return out;
}

std::int64_t LocalityHistogram::total(const std::map<int, std::int64_t>& h) {
  std::int64_t t = 0;
  for (const auto& [_, c] : h) t += c;
  return t;
}

LocalityHistogram edge_locality(std::span<const EdgeStreamEvent> stream, const MerchantSet& merchants) {
  require_sorted(stream);
  const Interned ids = intern(stream);
  DynamicGraph graph(ids.nodes);
  CloseQueue closing;
  LocalityHistogram h;
  std::size_t added = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const std::int64_t b = stream[i].open_block;
    for (; added < i && stream[added].open_block < b; ++added) {
      graph.add(ids.src[added], ids.trg[added]);
      if (stream[added].close_block) closing.emplace(*stream[added].close_block, added);
    }
    while (!closing.empty() && closing.top().first <= b) {
      const std::size_t k = closing.top().second;
      closing.pop();
      graph.remove(ids.src[k], ids.trg[k]);
    }
    const int d = graph.distance(ids.src[i], ids.trg[i]);
    ++h.all[d];
    if (merchants.count(stream[i].src) != 0 || merchants.count(stream[i].trg) != 0) ++h.merchant[d];
  }
  return h;
}

void write_locality_csv(std::ostream& out, const LocalityHistogram& h) {
  out << "distance,count,fraction,merchant_count,merchant_fraction\n";
  const double all = static_cast<double>(LocalityHistogram::total(h.all));
  const double merch = static_cast<double>(LocalityHistogram::total(h.merchant));
  std::vector<int> keys;
  for (const auto& [d, _] : h.all) keys.push_back(d);
  // Unreachable last.
  std::stable_partition(keys.begin(), keys.end(), [](int d) { return d >= 0; });
  for (const int d : keys) {
    const std::int64_t c = h.all.at(d);
    const auto it = h.merchant.find(d);
    const std::int64_t mc = it == h.merchant.end() ? 0 : it->second;
    csv::write_row(out, {d < 0 ? "inf" : std::to_string(d), std::to_string(c),
                         csv::format_fixed(all > 0 ? static_cast<double>(c) / all : 0.0, 6), std::to_string(mc),
                         csv::format_fixed(merch > 0 ? static_cast<double>(mc) / merch : 0.0, 6)});
  }
}

LifetimeSummary lifetimes(std::span<const EdgeStreamEvent> stream, const MerchantSet& merchants) {
  LifetimeSummary s;
  for (const auto& e : stream) {
    s.last_block = std::max(s.last_block, e.close_block.value_or(e.open_block));
  }
  struct NodeSpan {
    std::int64_t first = 0, end = 0;
    bool open = false;
  };
  std::map<std::string, NodeSpan> spans;
  double sum = 0, merchant_sum = 0;
  std::int64_t merchant_count = 0;
  for (const auto& e : stream) {
    ChannelLifetime c;
    c.channel_id = e.channel_id;
    c.open_block = e.open_block;
    c.censored = !e.close_block.has_value();
    const std::int64_t end = e.close_block.value_or(s.last_block);
    c.lifetime = end - e.open_block;
    c.merchant = merchants.count(e.src) != 0 || merchants.count(e.trg) != 0;
    sum += static_cast<double>(c.lifetime);
    if (c.merchant) {
      merchant_sum += static_cast<double>(c.lifetime);
      ++merchant_count;
    }
    for (const std::string* node : {&e.src, &e.trg}) {
      auto [it, inserted] = spans.try_emplace(*node, NodeSpan{e.open_block, end, c.censored});
      if (!inserted) {
        it->second.first = std::min(it->second.first, e.open_block);
        it->second.end = std::max(it->second.end, end);
        it->second.open = it->second.open || c.censored;
      }
    }
    s.channels.push_back(std::move(c));
  }
  if (!s.channels.empty()) s.mean_channel = sum / static_cast<double>(s.channels.size());
  if (merchant_count > 0) s.mean_merchant_channel = merchant_sum / static_cast<double>(merchant_count);

  double node_sum = 0, merchant_node_sum = 0;
  std::int64_t merchant_nodes = 0;
  for (const auto& [node, span] : spans) {
    NodeLifetime n{node, span.first, (span.open ? s.last_block : span.end) - span.first, span.open,
                   merchants.count(node) != 0};
    node_sum += static_cast<double>(n.lifetime);
    if (n.merchant) {
      merchant_node_sum += static_cast<double>(n.lifetime);
      ++merchant_nodes;
    }
    s.nodes.push_back(std::move(n));
  }
  if (!s.nodes.empty()) s.mean_node = node_sum / static_cast<double>(s.nodes.size());
  if (merchant_nodes > 0) s.mean_merchant_node = merchant_node_sum / static_cast<double>(merchant_nodes);
  return s;
}

void write_lifetimes_csv(std::ostream& out, const LifetimeSummary& s) {
  out << "channel_id,open_block,lifetime,censored,merchant\n";
  for (const auto& c : s.channels) {
    csv::write_row(out, {c.channel_id, std::to_string(c.open_block), std::to_string(c.lifetime),
                         c.censored ? "true" : "false", c.merchant ? "true" : "false"});
  }
}

std::vector<AttachmentPoint> attachment_curve(std::span<const EdgeStreamEvent> stream) {
  require_sorted(stream);
  const Interned ids = intern(stream);
  std::vector<std::size_t> degree(ids.nodes, 0);
  // Nodes currently holding each degree (>= 1), with lazily integrated exposure.
  std::vector<std::int64_t> holders(1, 0), last_change(1, 0);
  std::vector<double> exposure(1, 0.0);
  std::vector<std::int64_t> events(1, 0);
  const auto grow = [&](std::size_t d) {
    if (holders.size() <= d) {
      holders.resize(d + 1, 0);
      last_change.resize(d + 1, 0);
      exposure.resize(d + 1, 0.0);
      events.resize(d + 1, 0);
    }
  };
  const auto shift = [&](std::size_t d, std::int64_t delta, std::int64_t t) {
    if (d == 0) return;
    grow(d);
    exposure[d] += static_cast<double>(holders[d]) * static_cast<double>(t - last_change[d]);
    last_change[d] = t;
    holders[d] += delta;
  };
  const auto set_degree = [&](std::uint32_t v, std::size_t d, std::int64_t t) {
    shift(degree[v], -1, t);
    degree[v] = d;
    shift(d, +1, t);
  };

  CloseQueue closing;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto t = static_cast<std::int64_t>(i);
    while (!closing.empty() && closing.top().first <= stream[i].open_block) {
      const std::size_t k = closing.top().second;
      closing.pop();
      set_degree(ids.src[k], degree[ids.src[k]] - 1, t);
      set_degree(ids.trg[k], degree[ids.trg[k]] - 1, t);
    }
    for (const std::uint32_t v : {ids.src[i], ids.trg[i]}) {
      grow(degree[v]);
      ++events[degree[v]];
    }
    set_degree(ids.src[i], degree[ids.src[i]] + 1, t + 1);
    set_degree(ids.trg[i], degree[ids.trg[i]] + 1, t + 1);
    if (stream[i].close_block) closing.emplace(*stream[i].close_block, i);
  }
  const auto end = static_cast<std::int64_t>(stream.size());
  std::vector<AttachmentPoint> curve;
  for (std::size_t d = 0; d < holders.size(); ++d) {
    if (d > 0) shift(d, 0, end);
    if (events[d] == 0 && exposure[d] == 0) continue;
    AttachmentPoint p{d, events[d], exposure[d], std::nullopt};
    if (d > 0 && exposure[d] > 0) p.probability = static_cast<double>(events[d]) / exposure[d];
    curve.push_back(p);
  }
  return curve;
}

void write_attachment_csv(std::ostream& out, std::span<const AttachmentPoint> curve) {
  out << "degree,endpoint_events,exposure,probability\n";
  for (const auto& p : curve) {
    csv::write_row(out, {std::to_string(p.degree), std::to_string(p.endpoint_events), csv::format_fixed(p.exposure, 0),
                         p.probability ? csv::format_fixed(*p.probability, 8) : ""});
  }
}

}  // namespace lnsim::netstats
