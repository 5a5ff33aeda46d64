#include "lnsim/netstats/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "lnsim/csv.hpp"
#include "lnsim/netstats/correlation.hpp"
#include "lnsim/parallel.hpp"
#include "lnsim/rng.hpp"

namespace lnsim::netstats {

SimpleGraph::SimpleGraph(std::size_t nodes, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges,
                         bool directed)
    : directed_(directed), offset_(nodes + 1, 0) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  arcs.reserve(directed ? edges.size() : 2 * edges.size());
  for (const auto& [u, v] : edges) {
    if (u >= nodes || v >= nodes) throw std::out_of_range("edge endpoint out of range");
    if (u == v) continue;
    arcs.emplace_back(u, v);
    if (!directed) arcs.emplace_back(v, u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  list_.reserve(arcs.size());
  for (const auto& [u, v] : arcs) {
    ++offset_[u + 1];
    list_.push_back(v);
  }
  std::partial_sum(offset_.begin(), offset_.end(), offset_.begin());
}

SimpleGraph undirected_projection(const SnapshotGraph& graph) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(graph.channel_count());
  for (const Channel& c : graph.channels()) edges.emplace_back(c.node_a, c.node_b);
  return SimpleGraph(graph.node_count(), edges, false);
}

SimpleGraph directed_projection(const SnapshotGraph& graph) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(graph.edge_count());
  for (const DirectedChannelEdge& e : graph.edges()) {
    if (!e.policy.disabled) edges.emplace_back(e.src, e.trg);
  }
  return SimpleGraph(graph.node_count(), edges, true);
}

namespace {

// Sources are split into a fixed number of chunks whose partial results are
// merged in chunk order, so floating-point sums do not depend on scheduling.
constexpr std::size_t kChunks = 64;

}  // namespace

std::vector<double> betweenness(const SimpleGraph& graph, int workers) {
  const std::size_t n = graph.node_count();
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(n, 1));
  std::vector<std::vector<double>> partial(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    std::vector<double> acc(n, 0.0), sigma(n), delta(n);
    std::vector<int> dist(n);
    std::vector<std::uint32_t> order;
    order.reserve(n);
    for (std::size_t s = c * n / chunks; s < (c + 1) * n / chunks; ++s) {
      std::fill(dist.begin(), dist.end(), -1);
      std::fill(sigma.begin(), sigma.end(), 0.0);
      order.clear();
      dist[s] = 0;
      sigma[s] = 1;
      order.push_back(static_cast<std::uint32_t>(s));
      for (std::size_t head = 0; head < order.size(); ++head) {
        const std::uint32_t v = order[head];
        for (const std::uint32_t w : graph.neighbors(v)) {
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            order.push_back(w);
          }
          if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
        }
      }
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::uint32_t v = *it;
        double d = 0;
        for (const std::uint32_t w : graph.neighbors(v)) {
          if (dist[w] == dist[v] + 1) d += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        delta[v] = d;
        if (v != s) acc[v] += d;
      }
    }
    partial[c] = std::move(acc);
  });
  std::vector<double> b(n, 0.0);
  for (const auto& p : partial) {
    for (std::size_t v = 0; v < n; ++v) b[v] += p[v];
  }
  if (!graph.directed()) {
    for (double& x : b) x /= 2.0;
  }
  return b;
}

std::optional<double> cpd_from_betweenness(std::span<const double> b, bool directed) {
  const std::size_t n = b.size();
  if (n < 3) return std::nullopt;
  const double bmax = *std::max_element(b.begin(), b.end());
  double sum = 0;
  for (const double x : b) sum += bmax - x;
  const double nn = static_cast<double>(n);
  const double center = directed ? (nn - 1) * (nn - 2) : (nn - 1) * (nn - 2) / 2.0;
  return std::clamp(sum / ((nn - 1) * center), 0.0, 1.0);
}

std::optional<double> cpd(const SimpleGraph& graph, int workers) {
  if (graph.node_count() < 3) return std::nullopt;
  return cpd_from_betweenness(betweenness(graph, workers), graph.directed());
}

std::optional<double> transitivity(const SimpleGraph& graph) {
  if (graph.directed()) throw std::invalid_argument("transitivity needs an undirected graph");
  const std::size_t n = graph.node_count();
  double triples = 0;
  std::uint64_t closed = 0;  // each triangle counted once per corner
  std::vector<char> mark(n, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    const double d = static_cast<double>(graph.degree(v));
    triples += d * (d - 1) / 2.0;
    const auto nv = graph.neighbors(v);
    for (const auto u : nv) mark[u] = 1;
    for (const auto u : nv) {
      for (const auto w : graph.neighbors(u)) {
        if (w > u && mark[w]) ++closed;
      }
    }
    for (const auto u : nv) mark[u] = 0;
  }
  if (triples == 0) return std::nullopt;
  // closed = 3 x triangles: every triangle is seen from each of its corners.
  return static_cast<double>(closed) / triples;
}

std::vector<double> hop_plot(const SimpleGraph& graph, int workers) {
  const std::size_t n = graph.node_count();
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(n, 1));
  std::vector<std::vector<std::uint64_t>> partial(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    std::vector<std::uint64_t> counts;
    std::vector<int> dist(n);
    std::vector<std::uint32_t> queue;
    for (std::size_t s = c * n / chunks; s < (c + 1) * n / chunks; ++s) {
      std::fill(dist.begin(), dist.end(), -1);
      queue.assign(1, static_cast<std::uint32_t>(s));
      dist[s] = 0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto v = queue[head];
        for (const auto w : graph.neighbors(v)) {
          if (dist[w] >= 0) continue;
          dist[w] = dist[v] + 1;
          if (counts.size() <= static_cast<std::size_t>(dist[w])) counts.resize(dist[w] + 1, 0);
          ++counts[dist[w]];
          queue.push_back(w);
        }
      }
    }
    partial[c] = std::move(counts);
  });
  std::vector<std::uint64_t> counts;
  for (const auto& p : partial) {
    if (counts.size() < p.size()) counts.resize(p.size(), 0);
    for (std::size_t d = 0; d < p.size(); ++d) counts[d] += p[d];
  }
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) return {};
  std::vector<double> cumulative(counts.size(), 0.0);
  std::uint64_t running = 0;
  for (std::size_t d = 1; d < counts.size(); ++d) {
    running += counts[d];
    cumulative[d] = static_cast<double>(running) / static_cast<double>(total);
  }
  return cumulative;
}

std::optional<double> effective_diameter_from_hop_plot(std::span<const double> g, double quantile) {
  if (g.size() < 2) return std::nullopt;
  for (std::size_t d = 1; d < g.size(); ++d) {
    if (g[d] >= quantile) {
      return static_cast<double>(d - 1) + (quantile - g[d - 1]) / (g[d] - g[d - 1]);
    }
  }
  return static_cast<double>(g.size() - 1);
}

std::optional<double> effective_diameter(const SimpleGraph& graph, double quantile, int workers) {
  if (!(quantile > 0 && quantile <= 1)) throw std::invalid_argument("quantile must lie in (0, 1]");
  const auto g = hop_plot(graph, workers);
  return effective_diameter_from_hop_plot(g, quantile);
}

int exact_diameter(const SimpleGraph& graph) {
  const auto g = hop_plot(graph);
  return g.empty() ? 0 : static_cast<int>(g.size() - 1);
}

std::size_t largest_scc_size(const SimpleGraph& graph) {
  const std::size_t n = graph.node_count();
  constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::size_t>> call;  // node, next neighbour position
  std::uint32_t next_index = 0;
  std::size_t best = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      const auto nb = graph.neighbors(v);
      if (pos < nb.size()) {
        const std::uint32_t w = nb[pos++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::uint32_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::size_t size = 0;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          ++size;
        } while (w != done);
        best = std::max(best, size);
      }
    }
  }
  return best;
}

std::optional<ReferenceModel> parse_reference_model(std::string_view name) {
  if (name == "erdos_renyi" || name == "er") return ReferenceModel::kErdosRenyi;
  if (name == "barabasi_albert" || name == "ba") return ReferenceModel::kBarabasiAlbert;
  return std::nullopt;
}

std::string_view to_string(ReferenceModel model) {
  return model == ReferenceModel::kErdosRenyi ? "erdos_renyi" : "barabasi_albert";
}

SimpleGraph erdos_renyi(std::size_t n, std::size_t m, std::uint64_t seed) {
  const std::uint64_t pairs = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (m > pairs) throw std::invalid_argument("G(n, m) needs m <= n(n-1)/2");
  Rng rng(seed);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(m);
  const auto decode = [n](std::uint64_t code) {
    return std::pair{static_cast<std::uint32_t>(code / n), static_cast<std::uint32_t>(code % n)};
  };
  if (2 * m > pairs) {
    std::vector<std::uint64_t> all;
    all.reserve(pairs);
    for (std::uint64_t u = 0; u < n; ++u) {
      for (std::uint64_t v = u + 1; v < n; ++v) all.push_back(u * n + v);
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::swap(all[i], all[i + rng.uniform_below(all.size() - i)]);
      edges.push_back(decode(all[i]));
    }
  } else {
    std::unordered_set<std::uint64_t> seen;
    while (edges.size() < m) {
      auto u = rng.uniform_below(n);
      auto v = rng.uniform_below(n);
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (seen.insert(u * n + v).second) edges.push_back(decode(u * n + v));
    }
  }
  return SimpleGraph(n, edges, false);
}

SimpleGraph barabasi_albert(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("attachment parameter must be at least 1");
  if (n < k + 1) throw std::invalid_argument("preferential attachment needs n >= k + 1");
  Rng rng(seed);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint32_t> endpoints;  // each node repeated once per incident edge
  for (std::uint32_t v = 1; v <= k; ++v) {
    edges.emplace_back(0, v);
    endpoints.push_back(0);
    endpoints.push_back(v);
  }
  std::vector<std::uint32_t> targets;
  for (auto v = static_cast<std::uint32_t>(k + 1); v < n; ++v) {
    targets.clear();
    while (targets.size() < k) {
      const std::uint32_t t = endpoints[rng.uniform_below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (const auto t : targets) {
      edges.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return SimpleGraph(n, edges, false);
}

SimpleGraph reference_graph(std::size_t n, std::size_t m, ReferenceModel model, std::uint64_t seed) {
  if (model == ReferenceModel::kErdosRenyi) return erdos_renyi(n, m, seed);
  if (n == 0) throw std::invalid_argument("reference graph needs nodes");
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(m) / static_cast<double>(n))));
  return barabasi_albert(n, k, seed);
}

namespace {

SimpleGraph drop_isolated(const SimpleGraph& graph) {
  std::vector<std::uint32_t> remap(graph.node_count(), 0);
  std::uint32_t next = 0;
  for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
    if (graph.degree(v) > 0) remap[v] = next++;
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
    for (const auto w : graph.neighbors(v)) {
      if (graph.directed() || v < w) edges.emplace_back(remap[v], remap[w]);
    }
  }
  return SimpleGraph(next, edges, graph.directed());
}

std::string opt(const std::optional<double>& v) { return v ? csv::format_fixed(*v, 6) : std::string(); }

}  // namespace

GraphMetrics graph_metrics(std::string window, const SimpleGraph& graph, std::size_t edges, int workers) {
  const SimpleGraph core = drop_isolated(graph);
  GraphMetrics m;
  m.window = std::move(window);
  m.nodes = core.node_count();
  m.edges = edges;
  if (m.nodes > 0) m.avg_degree = 2.0 * static_cast<double>(edges) / static_cast<double>(m.nodes);
  if (m.nodes >= 2) {
    m.eff_diameter = effective_diameter(core, 0.9, workers);
    m.transitivity = transitivity(core);
  }
  m.cpd = cpd(core, workers);
  return m;
}

GraphMetrics graph_metrics(const SnapshotGraph& graph, int workers) {
  return graph_metrics(graph.snapshot_id(), undirected_projection(graph), graph.channel_count(), workers);
}

void write_graph_metrics_csv(std::ostream& out, std::span<const GraphMetrics> rows, bool with_model_column,
                             std::string_view model) {
  if (with_model_column) out << "model,";
  out << "window,N,E,avg_degree,eff_diameter,cpd,transitivity\n";
  for (const auto& r : rows) {
    std::vector<std::string> fields;
    if (with_model_column) fields.emplace_back(model);
    fields.insert(fields.end(), {r.window, std::to_string(r.nodes), std::to_string(r.edges),
                                 csv::format_fixed(r.avg_degree, 6), opt(r.eff_diameter), opt(r.cpd),
                                 opt(r.transitivity)});
    csv::write_row(out, fields);
  }
}

std::optional<DensificationFit> densification_fit(std::span<const std::pair<double, double>> n_e) {
  if (n_e.size() < 3) throw std::invalid_argument("densification fit needs at least three points");
  std::vector<double> lx, ly;
  for (const auto& [n, e] : n_e) {
    if (!(n > 0) || !(e > 0)) throw std::invalid_argument("densification fit needs positive counts");
    lx.push_back(std::log(n));
    ly.push_back(std::log(e));
  }
  const double k = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0) return std::nullopt;
  DensificationFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

std::string_view to_string(CentralityMeasure m) {
  switch (m) {
    case CentralityMeasure::kBetweenness: return "betweenness";
    case CentralityMeasure::kDegree: return "degree";
    case CentralityMeasure::kCapacity: return "capacity";
  }
  return "?";
}

std::vector<double> centrality(const SnapshotGraph& graph, CentralityMeasure measure, int workers) {
  switch (measure) {
    case CentralityMeasure::kBetweenness: return betweenness(directed_projection(graph), workers);
    case CentralityMeasure::kDegree: {
      std::vector<double> d(graph.node_count());
      for (NodeIndex v = 0; v < graph.node_count(); ++v) d[v] = static_cast<double>(graph.channel_degree(v));
      return d;
    }
    case CentralityMeasure::kCapacity: {
      std::vector<double> cap(graph.node_count(), 0.0);
      for (const Channel& c : graph.channels()) {
        cap[c.node_a] += static_cast<double>(c.capacity_sat);
        cap[c.node_b] += static_cast<double>(c.capacity_sat);
      }
      return cap;
    }
  }
  return {};
}

std::vector<CentralityCorrelation> centrality_income_correlation(const AggregateResult& aggregate,
                                                                 std::span<const SnapshotGraph> snapshots,
                                                                 std::span<const CentralityMeasure> measures,
                                                                 int workers) {
  std::vector<CentralityCorrelation> out;
  std::vector<double> sums(measures.size(), 0.0);
  std::vector<int> counts(measures.size(), 0);
  for (std::size_t snap = 0; snap < snapshots.size(); ++snap) {
    const SnapshotGraph& g = snapshots[snap];
    if (g.node_count() < 2) continue;
    std::vector<double> income(g.node_count(), 0.0);
    int runs = 0;
    for (const DayResult& day : aggregate.cells) {
      if (day.snapshot_index != snap) continue;
      ++runs;
      for (NodeIndex v = 0; v < g.node_count(); ++v) income[v] += to_sat(day.node_stats[v].routing_income_msat);
    }
    if (runs == 0) continue;
    for (double& x : income) x /= runs;
    for (std::size_t m = 0; m < measures.size(); ++m) {
      const auto c = centrality(g, measures[m], workers);
      if (const auto r = spearman(income, c).value) {
        sums[m] += *r;
        ++counts[m];
      }
    }
  }
  for (std::size_t m = 0; m < measures.size(); ++m) {
    CentralityCorrelation c{measures[m], std::nullopt, counts[m]};
    if (counts[m] > 0) c.spearman = sums[m] / counts[m];
    out.push_back(c);
  }
  return out;
}

}  // namespace lnsim::netstats
