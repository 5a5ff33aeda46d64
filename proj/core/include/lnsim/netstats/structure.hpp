#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lnsim/ingest.hpp"
#include "lnsim/sim_engine.hpp"

namespace lnsim::netstats {

/// Simple graph on nodes 0..n-1 with sorted, duplicate-free adjacency lists.
/// Undirected graphs store each edge in both lists.
class SimpleGraph {
 public:
  SimpleGraph() = default;
  /// Self-loops and repeated pairs are dropped.
  SimpleGraph(std::size_t nodes, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges, bool directed);

  std::size_t node_count() const noexcept { return offset_.empty() ? 0 : offset_.size() - 1; }
  /// Undirected edges counted once.
  std::size_t edge_count() const noexcept { return directed_ ? list_.size() : list_.size() / 2; }
  bool directed() const noexcept { return directed_; }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {list_.data() + offset_[v], offset_[v + 1] - offset_[v]};
  }
  std::size_t degree(std::uint32_t v) const { return offset_[v + 1] - offset_[v]; }

 private:
  bool directed_ = false;
  std::vector<std::size_t> offset_;
  std::vector<std::uint32_t> list_;
};

/// Undirected simple projection of the channel multigraph.
SimpleGraph undirected_projection(const SnapshotGraph& graph);
/// Directed simple projection of the routable edges.
SimpleGraph directed_projection(const SnapshotGraph& graph);

/// Hop-count shortest-path betweenness (Brandes), unnormalized. Undirected
/// graphs count each unordered pair once. Independent of `workers`.
std::vector<double> betweenness(const SimpleGraph& graph, int workers = 1);

/// Freeman central point dominance: sum of (B_max - B_i) over the maximum
/// that sum reaches on a star of the same order. Absent below three nodes.
std::optional<double> cpd(const SimpleGraph& graph, int workers = 1);
std::optional<double> cpd_from_betweenness(std::span<const double> b, bool directed);

/// 3 x triangles / connected triples; absent without triples.
std::optional<double> transitivity(const SimpleGraph& graph);

/// Share of connected ordered pairs within distance d, for d = 0, 1, ...
/// (index 0 is 0). Empty when no pair is connected.
std::vector<double> hop_plot(const SimpleGraph& graph, int workers = 1);

/// Interpolated distance at which `quantile` of the connected pairs are
/// reached. Absent when no pair is connected.
std::optional<double> effective_diameter(const SimpleGraph& graph, double quantile = 0.9, int workers = 1);
std::optional<double> effective_diameter_from_hop_plot(std::span<const double> cumulative, double quantile = 0.9);

/// Largest finite distance.
int exact_diameter(const SimpleGraph& graph);

/// Node count of the largest strongly connected component (Tarjan).
std::size_t largest_scc_size(const SimpleGraph& graph);

enum class ReferenceModel { kErdosRenyi, kBarabasiAlbert };
std::optional<ReferenceModel> parse_reference_model(std::string_view name);
std::string_view to_string(ReferenceModel model);

/// G(n, m) with m distinct uniform edges. Throws std::invalid_argument when
/// m exceeds n(n-1)/2.
SimpleGraph erdos_renyi(std::size_t n, std::size_t m, std::uint64_t seed);
/// Preferential attachment from a star on k+1 nodes; each new node links to
/// k distinct existing nodes chosen proportionally to degree.
SimpleGraph barabasi_albert(std::size_t n, std::size_t k, std::uint64_t seed);
/// Reference graph of order n with about m edges; BA uses k = max(1, round(m/n)).
SimpleGraph reference_graph(std::size_t n, std::size_t m, ReferenceModel model, std::uint64_t seed);

struct GraphMetrics {
  std::string window;
  std::size_t nodes = 0;  // non-isolated nodes
  std::size_t edges = 0;  // channels
  double avg_degree = 0;
  std::optional<double> eff_diameter;
  std::optional<double> cpd;
  std::optional<double> transitivity;
};

/// `edges` is the multigraph channel count; structural metrics use `graph`
/// restricted to nodes of positive degree.
GraphMetrics graph_metrics(std::string window, const SimpleGraph& graph, std::size_t edges, int workers = 1);
GraphMetrics graph_metrics(const SnapshotGraph& graph, int workers = 1);

void write_graph_metrics_csv(std::ostream& out, std::span<const GraphMetrics> rows, bool with_model_column = false,
                             std::string_view model = {});

struct DensificationFit {
  double exponent = 0;
  double intercept = 0;
  double r_squared = 0;
};

/// OLS of log E on log N. Throws std::invalid_argument with fewer than three
/// points or a non-positive count; absent when every N is equal.
std::optional<DensificationFit> densification_fit(std::span<const std::pair<double, double>> n_e);

enum class CentralityMeasure { kBetweenness, kDegree, kCapacity };
std::string_view to_string(CentralityMeasure m);

/// Per node of `graph`: directed betweenness, channel degree, or total
/// adjacent capacity.
std::vector<double> centrality(const SnapshotGraph& graph, CentralityMeasure measure, int workers = 1);

struct CentralityCorrelation {
  CentralityMeasure measure = CentralityMeasure::kBetweenness;
  std::optional<double> spearman;  // mean over snapshots with a defined value
  int snapshots = 0;
};

/// Spearman between each node's mean routing income on a snapshot (over the
/// runs of that snapshot) and its centrality there, averaged over snapshots.
std::vector<CentralityCorrelation> centrality_income_correlation(const AggregateResult& aggregate,
                                                                 std::span<const SnapshotGraph> snapshots,
                                                                 std::span<const CentralityMeasure> measures,
                                                                 int workers = 1);

}  // namespace lnsim::netstats
