#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "lnsim/competition.hpp"
#include "lnsim/csv.hpp"
#include "lnsim/netstats/correlation.hpp"
#include "lnsim/netstats/structure.hpp"
#include "lnsim/netstats/temporal.hpp"
#include "lnsim/privacy.hpp"
#include "lnsim/profitability.hpp"
#include "lnsim/sim_engine.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;

namespace lnsim::cli {

std::atomic<bool>& cancel_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  // global
  std::string snapshots, merchants, entities, edge_stream;
  std::string out = "results";
  std::optional<std::uint64_t> seed;
  int workers = 1;
  int verbose = 0;
  bool quiet = false;
  // simulation
  SimParams params;
  Satoshi alpha = 60000;
  std::optional<Satoshi> min_capacity;
  bool keep_disabled = false;
  std::string convention = "source";
  // simulate
  bool dump_transactions = false;
  // fee-competition
  std::string targets = "top:100";
  std::string delta_reference = "initial";
  // profitability
  std::string fee_weighting = "capacity";
  std::string capacities;
  double min_income = 50;
  double min_traffic = 10;
  double target_roi = 0.05;
  // sweep
  std::string axis = "alpha";
  std::vector<double> values;
  // entity-removal
  std::vector<std::string> remove;
  // privacy
  std::vector<int> lengths = {1, 2, 3, 4, 5, 6};
  std::vector<double> epsilons;
  std::vector<Satoshi> plausibility_amounts;
  std::vector<int> thresholds = {0, 1, 2, 3, 4, 5, 10, 15, 20, 30, 50, 100};
  int samples_per_cell = 20;
  GAParams ga;
  // graph-stats
  std::int64_t block_window = 1000;
  bool reference = false;
  // correlations
  std::vector<std::string> methods = {"spearman", "kendall", "weighted_kendall"};
  // convert
  std::string input, output;
  // replay
  std::string manifest;
};

/// Shared state of one invocation: resolved config, output bookkeeping.
class Session {
 public:
  Session(Config& config, std::vector<std::string> args) : cfg(config), args_(std::move(args)) {}

  Config& cfg;
  Manifest manifest;

  const std::atomic<bool>* cancel() const { return &cancel_flag(); }
  bool cancelled() const { return cancel_flag().load(); }

  ExperimentOptions experiment_options() const {
    ExperimentOptions o;
    o.workers = cfg.workers;
    o.cancel = cancel();
    return o;
  }

  LoadOptions load_options(Satoshi alpha) const {
    LoadOptions o;
    o.min_capacity_sat = cfg.min_capacity.value_or(alpha);
    o.keep_disabled = cfg.keep_disabled;
    o.convention = cfg.convention == "target" ? PolicyConvention::kTarget : PolicyConvention::kSource;
    return o;
  }

  const MerchantSet& merchants() {
    if (!merchants_) {
      merchants_ = cfg.merchants.empty() ? MerchantSet{} : load_merchants(cfg.merchants);
      manifest.add_input("merchants", cfg.merchants);
    }
    return *merchants_;
  }

  const EntityMap& entities() {
    if (!entities_) {
      entities_ = cfg.entities.empty() ? EntityMap{} : load_entities(cfg.entities);
      manifest.add_input("entities", cfg.entities);
    }
    return *entities_;
  }

  std::vector<SnapshotGraph> graphs(Satoshi alpha) {
    if (cfg.snapshots.empty()) throw UsageError("--snapshots is required for this command");
    if (!snapshots_recorded_) {
      manifest.add_input("snapshots", cfg.snapshots);
      snapshots_recorded_ = true;
    }
    auto loaded = load_snapshots(cfg.snapshots, load_options(alpha));
    for (auto& g : loaded) g.label_merchants(merchants());
    spdlog::info("loaded {} snapshot(s) from {}", loaded.size(), cfg.snapshots);
    return loaded;
  }

  std::vector<SnapshotGraph> graphs() { return graphs(cfg.alpha); }

  std::vector<EdgeStreamEvent> stream() {
    if (cfg.edge_stream.empty()) throw UsageError("--edge-stream is required for this command");
    manifest.add_input("edge_stream", cfg.edge_stream);
    return load_edge_stream(cfg.edge_stream);
  }

  /// Opens an output file in the output directory and registers it.
  template <class Fn>
  void emit(const std::string& name, Fn&& write) {
    const fs::path path = fs::path(cfg.out) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("{}: cannot open for writing", path.string()));
    write(out);
    out.flush();
    if (!out) throw Error(fmt::format("{}: write failed", path.string()));
    manifest.add_output(name);
    spdlog::info("wrote {}", path.string());
  }

 private:
  std::vector<std::string> args_;
  std::optional<MerchantSet> merchants_;
  std::optional<EntityMap> entities_;
  bool snapshots_recorded_ = false;
};

std::string fixed(double v, int decimals = 6) { return csv::format_fixed(v, decimals); }
std::string fixed(const std::optional<double>& v, int decimals = 6) {
  return v ? csv::format_fixed(*v, decimals) : std::string();
}

// ---------------------------------------------------------------- simulate

void write_path_lengths(std::ostream& out, const PathLengthStats& s) {
  out << "hop_count,count,fraction\n";
  for (const auto& [h, c] : s.histogram) csv::write_row(out, {std::to_string(h), std::to_string(c), fixed(s.fraction(h))});
}

bool cmd_simulate(Session& s) {
  const auto graphs = s.graphs();
  auto options = s.experiment_options();
  const AggregateResult r = run_experiment(graphs, s.entities(), s.cfg.params, options);
  s.emit("node_stats.csv", [&](std::ostream& o) { write_node_stats_csv(o, r); });
  s.emit("summary.csv", [&](std::ostream& o) { write_summary_csv(o, r); });
  s.emit("node_means.csv", [&](std::ostream& o) { write_node_means_csv(o, r); });
  s.emit("entity_means.csv", [&](std::ostream& o) { write_entity_means_csv(o, r); });
  s.emit("path_lengths.csv", [&](std::ostream& o) { write_path_lengths(o, r.paths); });
  if (s.cfg.dump_transactions) s.emit("transactions.csv", [&](std::ostream& o) { write_transactions_csv(o, r); });
  spdlog::info("failure fraction {:.4f}, mean path length {:.3f}", r.failure_fraction(), r.mean_path_length());
  return r.complete;
}

// --------------------------------------------------------- fee-competition

std::vector<std::string> entity_income_ranking(const AggregateResult& r) {
  std::vector<std::pair<double, std::string>> items;
  for (const auto& [name, m] : r.entity_means) items.emplace_back(m.routing_income_sat, name);
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  for (auto& [_, n] : items) out.push_back(std::move(n));
  return out;
}

bool cmd_fee_competition(Session& s) {
  DeltaReference reference = DeltaReference::kInitialBalances;
  if (s.cfg.delta_reference == "pre-payment") reference = DeltaReference::kPrePaymentBalances;

  const auto graphs = s.graphs();
  const EntityMap& entities = s.entities();
  const AggregateResult baseline = run_experiment(graphs, entities, s.cfg.params, s.experiment_options());
  if (!baseline.complete) return false;

  std::vector<RemovalTarget> targets;
  std::vector<std::string> ranking = income_ranking(baseline);
  const std::string& spec = s.cfg.targets;
  if (spec.rfind("top:", 0) == 0) {
    std::size_t n = 0;
    try {
      n = std::stoul(spec.substr(4));
    } catch (const std::exception&) {
      throw UsageError("--targets top:N needs a number");
    }
    targets = top_income_targets(baseline, n);
  } else if (spec == "entities") {
    for (const auto& name : entities.entity_names()) {
      const auto members = entities.members(name);
      targets.push_back({name, {members.begin(), members.end()}});
    }
    ranking = entity_income_ranking(baseline);
  } else {
    for (const auto& name : CLI::detail::split(spec, ',')) {
      const auto members = entities.members(name);
      targets.push_back({name, {members.begin(), members.end()}});
    }
    if (!entities.empty()) ranking = entity_income_ranking(baseline);
  }
  s.manifest.parameters()["target_count"] = targets.size();
  spdlog::info("analysing {} removal target(s)", targets.size());

  const auto summaries =
      analyze_targets(graphs, s.cfg.params, targets, reference, s.cfg.workers, s.cancel());
  const auto bands = group_report(summaries, ranking);
  s.emit("removal.csv", [&](std::ostream& o) { write_removal_csv(o, summaries); });
  s.emit("bands.csv", [&](std::ostream& o) { write_band_csv(o, bands); });
  return !s.cancelled();
}

// ------------------------------------------------------------ profitability

bool cmd_profitability(Session& s) {
  const auto weighting = parse_fee_weighting(s.cfg.fee_weighting);
  const auto graphs = s.graphs();
  const EntityMap& entities = s.entities();
  const AggregateResult r = run_experiment(graphs, entities, s.cfg.params, s.experiment_options());

  std::map<std::string, double> capacities;
  std::string source = "snapshots";
  if (!s.cfg.capacities.empty()) {
    capacities = load_entity_capacities(s.cfg.capacities);
    s.manifest.add_input("capacities", s.cfg.capacities);
    source = "file";
  } else {
    capacities = entity_capacities(graphs, entities);
  }
  const auto by_capacity = advertised_fees(graphs, entities, s.cfg.params.amount, FeeWeighting::kCapacity);
  const auto uniform = advertised_fees(graphs, entities, s.cfg.params.amount, FeeWeighting::kUniform);
  EntityReportOptions options;
  options.min_income_sat = s.cfg.min_income;
  options.min_traffic = s.cfg.min_traffic;
  options.target_roi = s.cfg.target_roi;
  options.weighting = *weighting;
  const auto rows = entity_report(r, *weighting == FeeWeighting::kUniform ? uniform : by_capacity, capacities,
                                  mean_network_capacity(graphs), options);
  s.emit("entity_report.csv", [&](std::ostream& o) { write_entity_report_csv(o, rows, source); });

  // The three fee aggregations side by side for the reported entities.
  s.emit("fee_aggregation.csv", [&](std::ostream& o) {
    o << "entity,capacity_weighted_fee_sat,uniform_fee_sat,realized_fee_sat\n";
    for (const auto& row : rows) {
      const auto find = [](const std::map<std::string, double>& m, const std::string& k) -> std::optional<double> {
        const auto it = m.find(k);
        return it == m.end() ? std::nullopt : std::optional<double>(it->second);
      };
      csv::write_row(o, {row.entity, fixed(find(by_capacity, row.entity), 1), fixed(find(uniform, row.entity), 1),
                         row.daily_traffic > 0 ? fixed(row.daily_income_sat / row.daily_traffic, 1) : ""});
    }
  });
  return r.complete;
}

// -------------------------------------------------------------------- sweep

bool cmd_sweep(Session& s) {
  const auto axis = parse_sweep_axis(s.cfg.axis);
  const MerchantSet& merchants = s.merchants();
  const EntityMap& entities = s.entities();
  (void)s.graphs();  // validates inputs and records them before the loop
  SnapshotLoader load = [&](Satoshi alpha) {
    return load_snapshots(s.cfg.snapshots, s.load_options(alpha));
  };
  const auto rows = sweep(load, s.cfg.alpha, merchants, entities, s.cfg.params, *axis, s.cfg.values,
                          s.experiment_options());
  s.emit(fmt::format("sweep_{}.csv", to_string(*axis)), [&](std::ostream& o) { write_sweep_csv(o, rows); });
  return !s.cancelled();
}

// ---------------------------------------------------------- depletion-ratio

bool cmd_depletion_ratio(Session& s) {
  const auto graphs = s.graphs();
  const auto rows = depletion_ratio(graphs, s.entities(), s.cfg.params, s.experiment_options());
  s.emit("depletion_ratio.csv", [&](std::ostream& o) { write_depletion_csv(o, rows); });
  return !s.cancelled();
}

// ----------------------------------------------------------- entity-removal

bool cmd_entity_removal(Session& s) {
  const auto graphs = s.graphs();
  const EntityMap& entities = s.entities();
  std::vector<std::string> removed = s.cfg.remove;
  if (removed.empty()) removed = entities.entity_names();
  if (removed.empty()) throw UsageError("entity-removal needs --entities or --remove");
  const auto rows = entity_removal_failures(graphs, entities, removed, s.cfg.params, s.experiment_options());
  s.emit("entity_removal.csv", [&](std::ostream& o) { write_removal_failures_csv(o, rows); });
  return !s.cancelled();
}

// ------------------------------------------------------------------ privacy

bool cmd_privacy(Session& s) {
  const auto graphs = s.graphs();
  const EntityMap& entities = s.entities();
  std::vector<double> epsilons = s.cfg.epsilons;
  if (epsilons.empty()) epsilons = {0.8, 1.0};

  std::vector<std::pair<double, PathLengthStats>> by_epsilon;
  for (const double eps : epsilons) {
    SimParams p = s.cfg.params;
    p.epsilon = eps;
    p.validate();
    const AggregateResult r = run_experiment(graphs, entities, p, s.experiment_options());
    by_epsilon.emplace_back(eps, r.paths);
    if (!r.complete) break;
  }
  s.emit("privacy.csv", [&](std::ostream& o) { write_privacy_csv(o, by_epsilon); });
  s.emit("single_hop.csv", [&](std::ostream& o) { write_single_hop_csv(o, by_epsilon); });

  std::vector<Satoshi> amounts = s.cfg.plausibility_amounts;
  if (amounts.empty()) amounts = {s.cfg.params.amount};
  std::vector<PlausibilityCurve> curves;
  for (const Satoshi amount : amounts) {
    PlausibilityCurve mean{amount, {}};
    for (const auto& g : graphs) {
      const auto c = plausibility_curve(g, amount, s.cfg.thresholds);
      if (mean.points.empty()) mean.points.assign(c.points.size(), {0, 0.0});
      for (std::size_t i = 0; i < c.points.size(); ++i) {
        mean.points[i].first = c.points[i].first;
        mean.points[i].second += c.points[i].second / static_cast<double>(graphs.size());
      }
    }
    curves.push_back(std::move(mean));
  }
  s.emit("plausibility.csv", [&](std::ostream& o) { write_plausibility_csv(o, curves); });

  if (s.cancelled()) return false;
  CostVsLengthOptions cvl;
  cvl.lengths = s.cfg.lengths;
  cvl.samples_per_cell = s.cfg.samples_per_cell;
  cvl.ga = s.cfg.ga;
  cvl.workers = s.cfg.workers;
  cvl.cancel = s.cancel();
  const auto costs = cost_vs_length(graphs, s.cfg.params, cvl);
  s.emit("cost_vs_length.csv", [&](std::ostream& o) { write_cost_vs_length_csv(o, costs); });
  return !s.cancelled();
}

// -------------------------------------------------------------- graph-stats

bool cmd_graph_stats(Session& s) {
  using namespace netstats;
  if (s.cfg.snapshots.empty() && s.cfg.edge_stream.empty()) {
    throw UsageError("graph-stats needs --snapshots and/or --edge-stream");
  }
  if (!s.cfg.snapshots.empty()) {
    const auto graphs = s.graphs();
    std::vector<GraphMetrics> rows;
    std::vector<GraphMetrics> er_rows, ba_rows;
    std::vector<std::pair<std::size_t, std::size_t>> sizes;
    for (std::size_t i = 0; i < graphs.size() && !s.cancelled(); ++i) {
      rows.push_back(graph_metrics(graphs[i], s.cfg.workers));
      sizes.emplace_back(rows.back().nodes, largest_scc_size(directed_projection(graphs[i])));
      if (s.cfg.reference) {
        const std::size_t n = rows.back().nodes;
        const SimpleGraph simple = undirected_projection(graphs[i]);
        const std::size_t m = simple.edge_count();
        const auto seed = derive_seed(s.cfg.params.seed, {3, i});
        const SimpleGraph er = reference_graph(n, m, ReferenceModel::kErdosRenyi, seed);
        const SimpleGraph ba = reference_graph(n, m, ReferenceModel::kBarabasiAlbert, seed);
        er_rows.push_back(graph_metrics(graphs[i].snapshot_id(), er, er.edge_count(), s.cfg.workers));
        ba_rows.push_back(graph_metrics(graphs[i].snapshot_id(), ba, ba.edge_count(), s.cfg.workers));
      }
    }
    s.emit("graph_metrics.csv", [&](std::ostream& o) { write_graph_metrics_csv(o, rows); });
    s.emit("snapshot_sizes.csv", [&](std::ostream& o) {
      o << "window,N,largest_scc\n";
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        csv::write_row(o, {rows[i].window, std::to_string(sizes[i].first), std::to_string(sizes[i].second)});
      }
    });
    if (s.cfg.reference) {
      s.emit("reference_metrics.csv", [&](std::ostream& o) {
        std::ostringstream ba;
        write_graph_metrics_csv(o, er_rows, true, "erdos_renyi");
        write_graph_metrics_csv(ba, ba_rows, true, "barabasi_albert");
        const std::string text = ba.str();
        o << text.substr(text.find('\n') + 1);  // drop the repeated header
      });
    }
  }
  if (!s.cfg.edge_stream.empty() && !s.cancelled()) {
    const auto stream = s.stream();
    const MerchantSet& merchants = s.merchants();
    const auto windows = temporal_metrics(stream, s.cfg.block_window, s.cfg.workers);
    s.emit("temporal_metrics.csv", [&](std::ostream& o) { write_graph_metrics_csv(o, windows); });
    std::vector<std::pair<double, double>> points;
    for (const auto& w : windows) {
      if (w.nodes > 0 && w.edges > 0) points.emplace_back(static_cast<double>(w.nodes), static_cast<double>(w.edges));
    }
    s.emit("densification.csv", [&](std::ostream& o) {
      o << "exponent,intercept,r_squared,points\n";
      std::optional<DensificationFit> fit;
      if (points.size() >= 3) fit = densification_fit(points);
      csv::write_row(o, {fit ? fixed(fit->exponent, 8) : "", fit ? fixed(fit->intercept, 8) : "",
                         fit ? fixed(fit->r_squared, 6) : "", std::to_string(points.size())});
    });
    const auto locality = edge_locality(stream, merchants);
    s.emit("locality.csv", [&](std::ostream& o) { write_locality_csv(o, locality); });
    const auto life = lifetimes(stream, merchants);
    s.emit("lifetimes.csv", [&](std::ostream& o) { write_lifetimes_csv(o, life); });
    s.emit("lifetime_summary.csv", [&](std::ostream& o) {
      o << "last_block,channels,mean_channel,mean_merchant_channel,nodes,mean_node,mean_merchant_node\n";
      csv::write_row(o, {std::to_string(life.last_block), std::to_string(life.channels.size()),
                         fixed(life.mean_channel, 3), fixed(life.mean_merchant_channel, 3),
                         std::to_string(life.nodes.size()), fixed(life.mean_node, 3),
                         fixed(life.mean_merchant_node, 3)});
    });
    const auto curve = attachment_curve(stream);
    s.emit("attachment.csv", [&](std::ostream& o) { write_attachment_csv(o, curve); });
  }
  return !s.cancelled();
}

// ------------------------------------------------------------- correlations

using netstats::NodeValues;

const std::array<std::string, 4> kStatistics = {"routing_income_sat", "routing_traffic", "sender_fee_sat",
                                                "sender_traffic"};

double statistic(const NodeDayStats& st, std::size_t which) {
  switch (which) {
    case 0: return to_sat(st.routing_income_msat);
    case 1: return static_cast<double>(st.routing_traffic);
    case 2: return to_sat(st.sender_fee_msat);
    default: return static_cast<double>(st.sender_traffic);
  }
}

NodeValues cell_values(const DayResult& day, std::size_t which) {
  NodeValues v;
  for (NodeIndex n = 0; n < day.graph->node_count(); ++n) {
    v.emplace(day.graph->node_id(n), statistic(day.node_stats[n], which));
  }
  return v;
}

bool cmd_correlations(Session& s) {
  using namespace netstats;
  std::vector<CorrelationMethod> methods;
  for (const auto& m : s.cfg.methods) {
    const auto parsed = parse_method(m);
    if (!parsed) throw UsageError(fmt::format("unknown correlation method '{}'", m));
    methods.push_back(*parsed);
  }
  const auto graphs = s.graphs();
  const EntityMap& entities = s.entities();
  const AggregateResult r = run_experiment(graphs, entities, s.cfg.params, s.experiment_options());
  if (!r.complete) return false;
  const auto runs = static_cast<std::size_t>(s.cfg.params.runs);

  s.emit("correlations.csv", [&](std::ostream& o) {
    o << "scope,statistic,method,a,b,value\n";
    for (std::size_t stat = 0; stat < kStatistics.size(); ++stat) {
      // Day values: mean over the runs of that snapshot.
      std::vector<NodeValues> days(graphs.size());
      for (std::size_t snap = 0; snap < graphs.size(); ++snap) {
        for (std::size_t run = 0; run < runs; ++run) {
          for (const auto& [k, v] : cell_values(r.cells[snap * runs + run], stat)) {
            days[snap][k] += v / static_cast<double>(runs);
          }
        }
      }
      for (const auto method : methods) {
        if (days.size() >= 2) {
          const auto m = cross_day_correlations(days, method);
          for (std::size_t i = 0; i < days.size(); ++i) {
            for (std::size_t j = i + 1; j < days.size(); ++j) {
              csv::write_row(o, {"cross_day", kStatistics[stat], std::string(to_string(method)),
                                 graphs[i].snapshot_id(), graphs[j].snapshot_id(), fixed(m[i][j])});
            }
          }
        }
        if (runs >= 2) {
          for (std::size_t snap = 0; snap < graphs.size(); ++snap) {
            std::vector<NodeValues> per_run;
            for (std::size_t run = 0; run < runs; ++run) per_run.push_back(cell_values(r.cells[snap * runs + run], stat));
            csv::write_row(o, {"cross_run", kStatistics[stat], std::string(to_string(method)),
                               graphs[snap].snapshot_id(), "", fixed(cross_run_correlation(per_run, method))});
          }
        }
      }
    }
  });

  std::vector<double> epsilons = s.cfg.epsilons;
  if (epsilons.empty()) epsilons = {s.cfg.params.epsilon};
  const std::array<CentralityMeasure, 3> measures = {CentralityMeasure::kBetweenness, CentralityMeasure::kDegree,
                                                     CentralityMeasure::kCapacity};
  std::vector<std::tuple<double, CentralityCorrelation>> rows;
  for (const double eps : epsilons) {
    if (s.cancelled()) break;
    SimParams p = s.cfg.params;
    p.epsilon = eps;
    p.validate();
    const AggregateResult re = eps == s.cfg.params.epsilon ? r : run_experiment(graphs, entities, p, s.experiment_options());
    for (const auto& c : centrality_income_correlation(re, graphs, measures, s.cfg.workers)) rows.emplace_back(eps, c);
  }
  s.emit("centrality.csv", [&](std::ostream& o) {
    o << "epsilon,measure,spearman,snapshots\n";
    for (const auto& [eps, c] : rows) {
      csv::write_row(o, {fixed(eps, 3), std::string(to_string(c.measure)), fixed(c.spearman),
                         std::to_string(c.snapshots)});
    }
  });
  return !s.cancelled();
}

// ------------------------------------------------------------------ convert

bool cmd_convert(Session& s) {
  s.manifest.add_input("gossip_dump", s.cfg.input);
  const auto rows = convert_gossip_dump(s.cfg.input);
  const std::string name =
      s.cfg.output.empty() ? fs::path(s.cfg.input).stem().string() + ".csv" : s.cfg.output;
  s.emit(name, [&](std::ostream& o) { write_canonical_csv(o, rows); });
  return true;
}

// ------------------------------------------------------------------ parsing

void add_simulation_flags(CLI::App& app, Config& c) {
  app.add_option("--tau", c.params.tau, "Transactions per simulated day")->capture_default_str();
  app.add_option("--alpha,--amount", c.alpha, "Payment amount in satoshi; also the channel capacity filter")
      ->capture_default_str();
  app.add_option("--min-capacity", c.min_capacity, "Capacity filter in satoshi, when it should differ from alpha");
  app.add_option("--merchant-ratio,--epsilon", c.params.epsilon, "Share of merchant recipients")
      ->capture_default_str();
  app.add_option("--runs", c.params.runs, "Independent runs per snapshot")->capture_default_str();
  app.add_flag("--ignore-depletion", c.params.ignore_depletion, "Never block a direction for lack of balance");
  app.add_flag("--count-last-hop-fee", c.params.count_last_hop_fee, "Charge the fee of the edge into the recipient");
  app.add_option("--max-hops", c.params.max_hops, "Hop limit of a route")->capture_default_str();
  app.add_flag("--keep-disabled", c.keep_disabled, "Keep directions flagged as disabled");
  app.add_option("--policy-convention", c.convention, "Which endpoint's policy an edge carries")
      ->check(CLI::IsMember({"source", "target"}))
      ->capture_default_str();
}

void add_global_flags(CLI::App& app, Config& c) {
  app.add_option("--snapshots", c.snapshots, "Snapshot file or directory");
  app.add_option("--merchants", c.merchants, "CSV of merchant node ids (pub_key,tag)");
  app.add_option("--entities", c.entities, "CSV mapping nodes to entities (pub_key,entity_name)");
  app.add_option("--edge-stream", c.edge_stream, "CSV of channel openings and closures");
  app.add_option("--seed", c.seed, "Master seed; generated and recorded when omitted");
  app.add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_flag("-v,--verbose", c.verbose, "More logging (repeatable)");
  app.add_flag("-q,--quiet", c.quiet, "Only warnings and errors");
}

using Command = std::function<bool(Session&)>;

struct Parsed {
  std::string name;
  Command run;
};

void build(CLI::App& app, Config& c, std::vector<std::pair<CLI::App*, Parsed>>& commands) {
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(LNSIM_VERSION));
  add_global_flags(app, c);
  add_simulation_flags(app, c);

  const auto add = [&](const std::string& name, const std::string& help, Command run) {
    CLI::App* sub = app.add_subcommand(name, help);
    commands.emplace_back(sub, Parsed{name, std::move(run)});
    return sub;
  };

  auto* sim = add("simulate", "Simulate daily traffic and write node statistics", cmd_simulate);
  sim->add_flag("--dump-transactions", c.dump_transactions, "Also write the sampled transactions");

  auto* fee = add("fee-competition", "Failure ratios and optimal base-fee increments after node removal",
                  cmd_fee_competition);
  fee->add_option("--targets", c.targets, "top:N, entities, or a comma separated list of nodes/entities")
      ->capture_default_str();
  fee->add_option("--delta-reference", c.delta_reference, "Balances used to price detours")
      ->check(CLI::IsMember({"initial", "pre-payment"}))
      ->capture_default_str();

  auto* prof = add("profitability", "Per-entity income, RoI and economical fees", cmd_profitability);
  prof->add_option("--fee-weighting", c.fee_weighting, "Advertised fee aggregation")
      ->check(CLI::IsMember({"capacity", "uniform", "realized"}))
      ->capture_default_str();
  prof->add_option("--capacities", c.capacities, "CSV of entity capacities (entity,capacity_sat)");
  prof->add_option("--min-income", c.min_income, "Minimum daily income in satoshi")->capture_default_str();
  prof->add_option("--min-traffic", c.min_traffic, "Minimum daily forwarded payments")->capture_default_str();
  prof->add_option("--target-roi", c.target_roi, "Annual RoI for the economical fee")->capture_default_str();

  auto* sw = add("sweep", "Entity income and traffic over a grid of alpha or tau", cmd_sweep);
  sw->add_option("--axis", c.axis, "Swept parameter")->check(CLI::IsMember({"alpha", "tau"}))->capture_default_str();
  sw->add_option("--values", c.values, "Grid values")->delimiter(',')->required();

  add("depletion-ratio", "Income with depletion over income without, per entity", cmd_depletion_ratio);

  auto* rem = add("entity-removal", "Failure fraction after removing each entity", cmd_entity_removal);
  rem->add_option("--remove", c.remove, "Entities to remove (default: every entity of --entities)")
      ->delimiter(',');

  auto* priv = add("privacy", "Single-hop exposure, plausibility and fixed-length routing cost", cmd_privacy);
  priv->add_option("--lengths", c.lengths, "Path lengths for the fixed-length search")->delimiter(',');
  priv->add_option("--epsilons", c.epsilons, "Merchant ratios for the hop distribution")->delimiter(',');
  priv->add_option("--plausibility-amounts", c.plausibility_amounts, "Capacity thresholds in satoshi")
      ->delimiter(',');
  priv->add_option("--thresholds", c.thresholds, "Degree thresholds")->delimiter(',');
  priv->add_option("--samples-per-cell", c.samples_per_cell, "Payments examined per (snapshot, run)")
      ->capture_default_str();
  priv->add_option("--population", c.ga.population_size)->capture_default_str();
  priv->add_option("--generations", c.ga.generations)->capture_default_str();
  priv->add_option("--tournament", c.ga.tournament_size)->capture_default_str();
  priv->add_option("--elite", c.ga.elite_count)->capture_default_str();
  priv->add_option("--length-penalty", c.ga.length_penalty, "Fitness penalty per hop of deviation, msat")
      ->capture_default_str();

  auto* gs = add("graph-stats", "Structural and temporal graph metrics", cmd_graph_stats);
  gs->add_option("--block-window", c.block_window, "Blocks per window of the edge stream")->capture_default_str();
  gs->add_flag("--reference", c.reference, "Also measure Erdos-Renyi and Barabasi-Albert graphs of equal size");

  auto* corr = add("correlations", "Cross-day, cross-run and centrality correlations", cmd_correlations);
  corr->add_option("--methods", c.methods, "spearman, kendall, weighted_kendall")->delimiter(',');
  corr->add_option("--epsilons", c.epsilons, "Merchant ratios for the centrality correlation")->delimiter(',');

  auto* conv = add("convert", "Convert a node-client graph dump to the canonical CSV", cmd_convert);
  conv->add_option("--input", c.input, "Graph dump (.json)")->required();
  conv->add_option("--output", c.output, "File name inside --out (default: <input stem>.csv)");

  auto* replay = app.add_subcommand("replay", "Rerun the invocation recorded in a manifest");
  replay->add_option("manifest", c.manifest, "manifest.json")->required();
  commands.emplace_back(replay, Parsed{"replay", nullptr});
}

void configure_logging(const Config& c) {
  if (c.quiet) {
    spdlog::set_level(spdlog::level::warn);
  } else if (c.verbose > 0) {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
  }
}

void record_parameters(Session& s) {
  const Config& c = s.cfg;
  auto& p = s.manifest.parameters();
  p["tau"] = c.params.tau;
  p["alpha"] = c.alpha;
  p["amount"] = c.params.amount;
  p["min_capacity"] = c.min_capacity.value_or(c.alpha);
  p["merchant-ratio"] = c.params.epsilon;
  p["runs"] = c.params.runs;
  p["ignore_depletion"] = c.params.ignore_depletion;
  p["count_last_hop_fee"] = c.params.count_last_hop_fee;
  p["max_hops"] = c.params.max_hops;
  p["keep_disabled"] = c.keep_disabled;
  p["policy_convention"] = c.convention;
  p["workers"] = c.workers;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Payment channel network traffic simulator", "lnsim"};
  std::vector<std::pair<CLI::App*, Parsed>> commands;
  build(app, cfg, commands);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    const CLI::App* sub = nullptr;
    for (const auto& [a, _] : commands) {
      if (a->parsed()) sub = a;
    }
    out << (sub ? sub->help() : app.help());
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << LNSIM_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    const CLI::App* sub = nullptr;
    for (const auto& [a, _] : commands) {
      if (a->parsed()) sub = a;
    }
    err << "error: " << e.what() << "\n\n" << (sub ? sub->help() : app.help());
    return 2;
  }

  const Parsed* chosen = nullptr;
  for (const auto& [a, p] : commands) {
    if (a->parsed()) chosen = &p;
  }
  configure_logging(cfg);

  try {
    if (chosen->name == "replay") {
      std::vector<std::string> replay = Manifest::replay_arguments(cfg.manifest);
      // An explicit --out on the replay line redirects the outputs.
      for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--out") {
          replay.push_back("--out");
          replay.push_back(args[i + 1]);
        }
      }
      return run(replay, out, err);
    }

    cfg.params.amount = cfg.alpha;
    bool generated = false;
    if (!cfg.seed) {
      cfg.seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
      generated = true;
    }
    cfg.params.seed = *cfg.seed;
    try {
      cfg.params.validate();
      cfg.ga.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }

    std::vector<std::string> replay = args;
    if (generated) {
      replay.push_back("--seed");
      replay.push_back(std::to_string(*cfg.seed));
    }
    Session session(cfg, args);
    session.manifest.set_command(chosen->name, args, replay);
    session.manifest.set_seed(*cfg.seed, generated);
    record_parameters(session);

    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw Error(fmt::format("{}: cannot create output directory: {}", cfg.out, ec.message()));

    const bool complete = chosen->run(session);
    session.manifest.set_complete(complete);
    session.manifest.write(cfg.out);
    if (!complete) {
      err << "interrupted: partial results written to " << cfg.out << '\n';
      return 130;
    }
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace lnsim::cli
