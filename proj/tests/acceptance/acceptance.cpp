// Acceptance checks: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero when any check fails, except for the disproved ones listed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "lnsim/competition.hpp"
#include "lnsim/netstats/structure.hpp"
#include "lnsim/privacy.hpp"
#include "lnsim/profitability.hpp"
#include "lnsim/rng.hpp"
#include "lnsim/router.hpp"
#include "lnsim/sim_engine.hpp"
#include "testkit.hpp"

namespace {

using namespace lnsim;
namespace fs = std::filesystem;

// Tolerances.
constexpr double kTableRelTol = 1e-3;        // published inputs are rounded to 0.1
constexpr double kDensificationTol = 1e-9;   // planted exponent, noiseless data
constexpr double kBetweennessTol = 1e-9;     // float sums of path counts
constexpr double kDatasetFailureTol = 0.03;  // baseline and removal failure fractions
constexpr double kDatasetHopTol = 0.05;      // single-intermediary fractions

struct Verdict {
  enum Kind { kPass, kFail, kSkip } kind = kPass;
  std::string detail;
};

Verdict pass(std::string d) { return {Verdict::kPass, std::move(d)}; }
Verdict fail(std::string d) { return {Verdict::kFail, std::move(d)}; }
Verdict skip(std::string d) { return {Verdict::kSkip, std::move(d)}; }

bool near_rel(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

// ------------------------------------------------------------------ fee

// floor(rate * amount_msat / 1e6) = floor(rate * amount / 1000), split so that
// no product needs more than 64 bits for the generated ranges.
Millisat fee_oracle(std::int64_t base, std::int64_t rate, std::int64_t amount) {
  return base + rate * (amount / 1000) + (rate * (amount % 1000)) / 1000;
}

Verdict fee_arithmetic() {
  Rng rng(101);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    FeePolicy p;
    p.base_fee_msat = i % 10 == 0 ? 0 : rng.uniform_int(0, 10'000'000);
    p.fee_rate_ppm = i % 7 == 0 ? 0 : rng.uniform_int(0, 10'000'000);
    // Log-uniform amounts from 1 sat to 1e11 sat, plus small edge values.
    const Satoshi amount = i < 20 ? i : static_cast<Satoshi>(std::pow(10.0, 11.0 * rng.uniform01()));
    if (edge_fee(p, amount) != fee_oracle(p.base_fee_msat, p.fee_rate_ppm, amount)) ++mismatches;
  }
  if (mismatches != 0) return fail(fmt::format("{} of 1000 cases differ from the integer oracle", mismatches));
  return pass("1000 randomized policies and amounts, exact");
}

// ------------------------------------------------------------------ table

Verdict table_algebra() {
  std::vector<std::string> bad;
  const auto roi = annual_roi(158119.6, 969e6);
  const auto rompert = economical_fee(4371.9, 969e6, 158119.6);
  const auto lnbig = economical_fee(32.4, 53686e6, 6550.3);
  if (!roi || !near_rel(*roi * 100, 5.9557, kTableRelTol)) bad.push_back("rompert RoI");
  if (!rompert || !near_rel(rompert->fee_sat, 3670.3, kTableRelTol)) bad.push_back("rompert economical fee");
  if (!rompert || !near_rel(rompert->fee_ratio, 0.8395, kTableRelTol)) bad.push_back("rompert fee ratio");
  if (!lnbig || !near_rel(lnbig->fee_ratio, 1122.7, kTableRelTol)) bad.push_back("LNBIG fee ratio");
  if (!lnbig || !near_rel(lnbig->fee_sat, 36388.7, kTableRelTol)) bad.push_back("LNBIG economical fee");
  if (!bad.empty()) return fail(fmt::format("outside 0.1%: {}", fmt::join(bad, ", ")));
  return pass(fmt::format("RoI {:.4f}%, fees {:.1f} / {:.1f}, ratios {:.4f} / {:.1f}", *roi * 100, rompert->fee_sat,
                          lnbig->fee_sat, rompert->fee_ratio, lnbig->fee_ratio));
}

// ------------------------------------------------------------------ routing

Verdict routing_oracle() {
  std::int64_t queries = 0;
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    testkit::RandomGraphOptions o;
    o.nodes = 2 + static_cast<int>(seed % 9);
    o.density = 0.25 + 0.05 * static_cast<double>(seed % 8);
    const SnapshotGraph g = testkit::random_graph(seed, o);
    Rng rng(seed + 7);
    const BalanceState st = init_balances(g, rng);
    Router router(g);
    const Satoshi amount = 20'000 + static_cast<Satoshi>(seed % 5) * 15'000;
    for (const bool count_last : {false, true}) {
      RouteOptions ro;
      ro.count_last_hop_fee = count_last;
      for (NodeIndex s = 0; s < g.node_count(); ++s) {
        for (NodeIndex t = 0; t < g.node_count(); ++t) {
          if (s == t) continue;
          ++queries;
          const auto got = router.route(st, s, t, amount, ro);
          const auto want = testkit::brute_force_cheapest(g, st, s, t, amount, count_last);
          const bool same = got.ok() ? (want && *want == got.total_fee_msat) : !want.has_value();
          if (!same) ++mismatches;
        }
      }
    }
  }
  if (mismatches != 0) return fail(fmt::format("{} of {} queries disagree with enumeration", mismatches, queries));
  return pass(fmt::format("500 graphs, {} queries, exact", queries));
}

// ------------------------------------------------------------------ conservation

Verdict conservation() {
  std::vector<SnapshotGraph> fixtures;
  for (std::uint64_t s = 0; s < 4; ++s) {
    testkit::RandomGraphOptions o;
    o.nodes = 10;
    o.density = 0.4;
    fixtures.push_back(testkit::random_graph(900 + s, o));
  }
  fixtures.push_back(testkit::ln_like_graph(5, 120, 5));
  std::int64_t steps = 0, moved = 0, rejected = 0;
  std::vector<std::string> broken;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    const SnapshotGraph& g = fixtures[f];
    Rng rng(f + 31);
    BalanceState st = init_balances(g, rng);
    Satoshi capacity = 0;
    for (ChannelIndex c = 0; c < g.channel_count(); ++c) capacity += g.channel(c).capacity_sat;
    const Satoshi total = st.total_balance();
    if (total != capacity) broken.push_back(fmt::format("fixture {} initial total", f));
    Router router(g);
    for (int i = 0; i < 2000; ++i, ++steps) {
      const auto s = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
      auto t = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
      if (s == t) t = (t + 1) % static_cast<NodeIndex>(g.node_count());
      const Satoshi amount = rng.uniform_int(1, 150'000);
      const auto o = router.route(st, s, t, amount, {});
      if (o.ok()) {
        std::vector<Satoshi> before;
        for (const EdgeIndex e : o.edges) before.push_back(st.balance(e));
        st.apply_payment(o.edges, amount);
        for (std::size_t k = 0; k < o.edges.size(); ++k) {
          if (st.balance(o.edges[k]) != before[k] - amount) {
            broken.push_back(fmt::format("fixture {} step {}: hop {} moved the wrong amount", f, i, k));
          }
        }
        ++moved;
      } else if (!g.out_edges(s).empty()) {
        // An arbitrary edge may be overdrawn; the attempt must leave no trace.
        const EdgeIndex e = g.out_edges(s)[rng.uniform_below(g.out_edges(s).size())];
        const std::vector<Satoshi> before(st.forward_balances().begin(), st.forward_balances().end());
        const std::vector<EdgeIndex> path{e};
        try {
          st.apply_payment(path, st.balance(e) + 1);
          broken.push_back(fmt::format("fixture {} step {}: overdraft accepted", f, i));
        } catch (const ContractViolation&) {
          ++rejected;
        }
        if (!std::equal(before.begin(), before.end(), st.forward_balances().begin())) {
          broken.push_back(fmt::format("fixture {} step {}: rejected payment moved funds", f, i));
        }
      }
      for (ChannelIndex c = 0; c < g.channel_count(); ++c) {
        if (st.forward(c) < 0 || st.backward(c) < 0 || st.forward(c) + st.backward(c) != g.channel(c).capacity_sat) {
          broken.push_back(fmt::format("fixture {} step {} channel {}", f, i, c));
        }
      }
      if (st.total_balance() != total) broken.push_back(fmt::format("fixture {} step {}: total moved", f, i));
      if (broken.size() > 5) break;
    }
  }
  if (!broken.empty()) return fail(broken.front());
  return pass(fmt::format("{} steps, {} payments applied, {} overdrafts rejected", steps, moved, rejected));
}

// ------------------------------------------------------------------ beta*

Verdict beta_oracle() {
  Rng rng(55);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<std::size_t>(rng.uniform_below(40));
    const Millisat top = i % 3 == 0 ? 20 : 5000;  // small ranges force ties
    std::vector<Millisat> deltas(n);
    for (auto& d : deltas) d = rng.uniform_int(0, top);
    Millisat best_beta = 0, best_gain = 0;
    for (Millisat b = 0; b <= top; ++b) {
      const auto count = std::count_if(deltas.begin(), deltas.end(), [&](Millisat d) { return d >= b; });
      if (b * count > best_gain) {
        best_gain = b * count;
        best_beta = b;
      }
    }
    const FeeIncrement got = optimal_base_fee_increment(deltas);
    if (got.beta_star != best_beta || got.gain != best_gain) ++mismatches;
  }
  if (mismatches != 0) return fail(fmt::format("{} of 1000 lists differ from the scan", mismatches));
  return pass("1000 lists, every integer candidate scanned, exact");
}

// ------------------------------------------------------------------ determinism

std::string node_stats_bytes(const std::vector<SnapshotGraph>& graphs, const EntityMap& entities,
                             const SimParams& p, int workers) {
  ExperimentOptions o;
  o.workers = workers;
  std::ostringstream out;
  write_node_stats_csv(out, run_experiment(graphs, entities, p, o));
  return out.str();
}

Verdict determinism() {
  const auto graphs = testkit::ln_like_snapshots(17, 4, 300, 12);
  SimParams p;  // defaults
  p.seed = 20210801;
  const std::string one = node_stats_bytes(graphs, {}, p, 1);
  const std::string eight = node_stats_bytes(graphs, {}, p, 8);
  if (one != eight) return fail("node_stats.csv differs between 1 and 8 workers");
  SimParams other = p;
  other.seed = p.seed + 1;
  if (node_stats_bytes(graphs, {}, other, 8) == one) return fail("output does not depend on the seed");
  return pass(fmt::format("defaults (tau {}, runs {}), 4 snapshots, {} bytes identical", p.tau, p.runs,
                          one.size()));
}

// ------------------------------------------------------------------ depletion

struct Fixture {
  std::vector<SnapshotGraph> graphs;
  EntityMap entities;
};

std::vector<Fixture> dominance_fixtures() {
  std::vector<Fixture> out;
  for (std::uint64_t s = 0; s < 6; ++s) {
    testkit::RandomGraphOptions o;
    o.nodes = 9;
    o.density = 0.45;
    Fixture f;
    f.graphs.push_back(testkit::random_graph(300 + s, o));
    out.push_back(std::move(f));
  }
  for (std::uint64_t s = 0; s < 3; ++s) {
    Fixture f;
    f.graphs = testkit::ln_like_snapshots(40 + s, 2, 80, 4);
    out.push_back(std::move(f));
  }
  // Entities: consecutive node pairs, so each removal takes out two nodes.
  for (auto& f : out) {
    for (std::size_t i = 0; i < f.graphs.front().node_count(); ++i) {
      f.entities.assign(f.graphs.front().node_id(static_cast<NodeIndex>(i)), fmt::format("e{}", i / 2));
    }
  }
  return out;
}

struct DominanceCounts {
  std::int64_t days = 0;
  std::int64_t superset_violations = 0;
  std::int64_t removals = 0;
  std::int64_t below_baseline = 0;
  std::string example;
};

DominanceCounts count_dominance(bool ignore_depletion) {
  DominanceCounts n;
  const auto fixtures = dominance_fixtures();
  for (std::size_t fi = 0; fi < fixtures.size(); ++fi) {
    const Fixture& f = fixtures[fi];
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      SimParams p;
      p.tau = 300;
      p.runs = 2;
      p.amount = 40'000;
      p.seed = seed;
      p.ignore_depletion = ignore_depletion;
      if (!ignore_depletion) {
        SimParams optimistic = p;
        optimistic.ignore_depletion = true;
        for (std::size_t snap = 0; snap < f.graphs.size(); ++snap) {
          for (int run = 0; run < p.runs; ++run) {
            const auto cs = cell_seed(p.seed, snap, run);
            DayOptions keep;
            keep.keep_outcomes = true;
            const DayResult a = simulate_day(f.graphs[snap], p, cs, keep);
            const DayResult b = simulate_day(f.graphs[snap], optimistic, cs, keep);
            ++n.days;
            for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
              if (a.outcomes[i].ok() && !b.outcomes[i].ok()) ++n.superset_violations;
            }
          }
        }
      }
      for (const auto& r : entity_removal_failures(f.graphs, f.entities, f.entities.entity_names(), p)) {
        ++n.removals;
        if (r.failure_fraction < r.baseline_failure_fraction) {
          ++n.below_baseline;
          if (n.example.empty()) {
            n.example = fmt::format("fixture {} seed {} entity {}: {:.4f} < baseline {:.4f}", fi, seed, r.entity,
                                    r.failure_fraction, r.baseline_failure_fraction);
          }
        }
      }
    }
  }
  return n;
}

Verdict depletion_dominance() {
  const DominanceCounts enforced = count_dominance(false);
  const DominanceCounts ignored = count_dominance(true);
  if (enforced.superset_violations != 0) {
    return fail(fmt::format("{} payments succeed only with depletion enforced", enforced.superset_violations));
  }
  if (ignored.below_baseline != 0) {
    return fail(fmt::format("{} of {} removals without depletion lower the failure fraction; e.g. {}",
                            ignored.below_baseline, ignored.removals, ignored.example));
  }
  return pass(fmt::format("{} days superset; {} entity removals without depletion never below baseline",
                          enforced.days, ignored.removals));
}

// Removing nodes reroutes payments, and with depletion a rerouted payment can
// leave balance that a later payment needs; see the hand-built case in the
// unit tests. This line reports how often that happens on the fixtures.
Verdict removal_monotone_with_depletion() {
  const DominanceCounts enforced = count_dominance(false);
  if (enforced.below_baseline != 0) {
    return fail(fmt::format("{} of {} removals lower the failure fraction; e.g. {}", enforced.below_baseline,
                            enforced.removals, enforced.example));
  }
  return pass(fmt::format("{} entity removals never below baseline", enforced.removals));
}

// ------------------------------------------------------------------ GA

Verdict ga_contract() {
  const Satoshi amount = 20'000;
  int pairs = 0, outputs = 0, exact_baseline = 0;
  std::vector<std::string> broken;
  for (std::uint64_t gseed = 0; pairs < 200 && gseed < 50; ++gseed) {
    const SnapshotGraph g = testkit::ln_like_graph(600 + gseed, 150, 4);
    Rng rng(gseed);
    const BalanceState st = init_balances(g, rng);
    Router router(g);
    for (int k = 0; k < 40 && pairs < 200; ++k) {
      const auto s = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
      const auto t = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
      if (s == t) continue;
      const auto base = router.route(st, s, t, amount, {});
      if (!base.ok()) continue;
      ++pairs;
      std::set<int> lengths{1, 2, 3, 4, 5, 6};
      lengths.insert(base.hop_count());
      for (const int L : lengths) {
        GAParams ga;
        ga.target_length = L;
        ga.seed = gseed * 1000 + static_cast<std::uint64_t>(k * 10 + L);
        const auto o = lengthened_path(g, st, s, t, amount, ga);
        if (L == base.hop_count()) {
          if (!o.ok() || o.total_fee_msat != base.total_fee_msat) {
            broken.push_back(fmt::format("pair {}: L = baseline {} does not give the baseline cost", pairs, L));
          } else {
            ++exact_baseline;
          }
        }
        if (!o.ok()) continue;
        ++outputs;
        const std::set<NodeIndex> distinct(o.path.begin(), o.path.end());
        bool feasible = o.edges.size() + 1 == o.path.size();
        for (std::size_t i = 0; feasible && i < o.edges.size(); ++i) {
          const auto& e = g.edge(o.edges[i]);
          feasible = e.src == o.path[i] && e.trg == o.path[i + 1] && !e.policy.disabled && st.usable(o.edges[i], amount);
        }
        if (distinct.size() != o.path.size()) broken.push_back(fmt::format("pair {} L {}: not simple", pairs, L));
        if (!feasible) broken.push_back(fmt::format("pair {} L {}: infeasible edge", pairs, L));
        if (o.hop_count() != L) broken.push_back(fmt::format("pair {} L {}: {} hops", pairs, L, o.hop_count()));
        if (o.path.front() != s || o.path.back() != t) broken.push_back(fmt::format("pair {} L {}: ends", pairs, L));
        if (o.total_fee_msat < base.total_fee_msat) {
          broken.push_back(fmt::format("pair {} L {}: cheaper than the cheapest path", pairs, L));
        }
        if (path_cost(g, o.edges, amount, false).total_msat != o.total_fee_msat) {
          broken.push_back(fmt::format("pair {} L {}: reported cost differs from path cost", pairs, L));
        }
      }
    }
  }
  if (pairs < 200) broken.push_back(fmt::format("only {} routable pairs generated", pairs));
  if (!broken.empty()) return fail(fmt::format("{} violations, first: {}", broken.size(), broken.front()));
  return pass(fmt::format("{} pairs, {} fixed-length paths checked, {} exact at the baseline length", pairs, outputs,
                          exact_baseline));
}

// ------------------------------------------------------------------ graph metrics

Verdict graph_metrics() {
  using netstats::SimpleGraph;
  using Edges = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
  std::vector<std::string> bad;
  for (std::uint32_t n = 3; n <= 12; ++n) {
    Edges star, complete;
    for (std::uint32_t v = 1; v < n; ++v) star.emplace_back(0, v);
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t v = u + 1; v < n; ++v) complete.emplace_back(u, v);
    }
    const auto cs = netstats::cpd(SimpleGraph(n, star, false));
    const auto cc = netstats::cpd(SimpleGraph(n, complete, false));
    if (!cs || std::abs(*cs - 1.0) > 1e-12) bad.push_back(fmt::format("CPD(star {})", n));
    if (!cc || std::abs(*cc) > 1e-12) bad.push_back(fmt::format("CPD(complete {})", n));
  }
  const Edges triangle{{0, 1}, {1, 2}, {0, 2}};
  const auto tr = netstats::transitivity(SimpleGraph(3, triangle, false));
  if (!tr || *tr != 1.0) bad.push_back("transitivity(triangle)");

  std::vector<std::pair<double, double>> planted;
  for (int i = 0; i < 12; ++i) {
    const double n = 100.0 * std::pow(1.3, i);
    planted.emplace_back(n, 0.7 * std::pow(n, 1.37));
  }
  const auto fit = netstats::densification_fit(planted);
  if (!fit || std::abs(fit->exponent - 1.37) > kDensificationTol) bad.push_back("densification exponent");

  Rng rng(77);
  int graphs = 0;
  for (int i = 0; i < 300; ++i) {
    const auto n = static_cast<std::uint32_t>(2 + rng.uniform_below(7));
    const double density = 0.15 + 0.6 * rng.uniform01();
    Edges e;
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t v = 0; v < n; ++v) {
        if (u != v && rng.bernoulli(density)) e.emplace_back(u, v);
      }
    }
    const SimpleGraph g(n, e, i % 2 == 0);
    const auto got = netstats::betweenness(g, 1 + i % 3);
    const auto want = testkit::brute_force_betweenness(g);
    ++graphs;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (std::abs(got[v] - want[v]) > kBetweennessTol) {
        bad.push_back(fmt::format("betweenness graph {} node {}", i, v));
        break;
      }
    }
  }
  if (!bad.empty()) return fail(fmt::format("{} mismatches, first: {}", bad.size(), bad.front()));
  return pass(fmt::format("CPD star/complete n=3..12, triangle, exponent {:.12f}, betweenness on {} graphs",
                          fit->exponent, graphs));
}

// ------------------------------------------------------------------ dataset

std::string find_entity(const EntityMap& entities, const std::string& needle) {
  for (const auto& name : entities.entity_names()) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower.find(needle) != std::string::npos) return name;
  }
  return {};
}

Verdict dataset_reproduction() {
  const char* root = std::getenv("LNSIM_DATASET_DIR");
  if (root == nullptr || *root == '\0') return skip("LNSIM_DATASET_DIR not set; dataset figures not reproducible");
  const fs::path dir(root);
  SimParams p;
  p.seed = 1;
  LoadOptions load;
  load.min_capacity_sat = p.amount;
  auto graphs = load_snapshots((dir / "snapshots").string(), load);
  const MerchantSet merchants = load_merchants((dir / "merchants.csv").string());
  for (auto& g : graphs) g.label_merchants(merchants);
  const EntityMap entities = load_entities((dir / "entities.csv").string());
  const int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  ExperimentOptions o;
  o.workers = workers;

  std::vector<std::string> notes, bad;
  const AggregateResult base = run_experiment(graphs, entities, p, o);
  const std::string lnbig = find_entity(entities, "lnbig");
  if (lnbig.empty() || base.entity_means.count(lnbig) == 0) {
    bad.push_back("no LNBIG entity");
  } else {
    const NodeMean& m = base.entity_means.at(lnbig);
    notes.push_back(fmt::format("LNBIG income {:.0f} traffic {:.0f}", m.routing_income_sat, m.routing_traffic));
    if (m.routing_income_sat < 5000 || m.routing_income_sat > 10000) bad.push_back("LNBIG income");
    if (m.routing_traffic < 200 || m.routing_traffic > 600) bad.push_back("LNBIG traffic");
    const std::vector<std::string> removed{lnbig};
    const auto r = entity_removal_failures(graphs, entities, removed, p, o);
    notes.push_back(fmt::format("failure {:.4f} -> {:.4f}", r.front().baseline_failure_fraction,
                                r.front().failure_fraction));
    if (std::abs(r.front().baseline_failure_fraction - 0.3543) > kDatasetFailureTol) bad.push_back("baseline failure");
    if (std::abs(r.front().failure_fraction - 0.3822) > kDatasetFailureTol) bad.push_back("LNBIG removal failure");
  }
  for (const auto& [eps, want] : {std::pair{0.8, 0.17}, std::pair{1.0, 0.37}}) {
    SimParams q = p;
    q.epsilon = eps;
    const auto got = single_hop_fraction(run_experiment(graphs, entities, q, o).paths).of_all;
    notes.push_back(fmt::format("single hop at {:.1f}: {:.3f}", eps, got.value_or(-1)));
    if (!got || std::abs(*got - want) > kDatasetHopTol) bad.push_back(fmt::format("single hop at {:.1f}", eps));
  }
  const auto targets = top_income_targets(base, 100);
  const auto summaries = analyze_targets(graphs, p, targets, DeltaReference::kInitialBalances, workers);
  const auto ranking = income_ranking(base);
  const auto bands = group_report(summaries, ranking);
  for (std::size_t i = 0; i < std::min<std::size_t>(4, bands.size()); ++i) {
    notes.push_back(fmt::format("band {} ratio {:.3f}", bands[i].band, bands[i].mean_failure_ratio));
    if (bands[i].mean_failure_ratio < 0.3) bad.push_back("band " + bands[i].band);
  }
  if (!bad.empty()) return fail(fmt::format("{}; {}", fmt::join(bad, ", "), fmt::join(notes, "; ")));
  return pass(fmt::format("{}", fmt::join(notes, "; ")));
}

// Criteria that do not hold for the model, with a counterexample in the unit
// tests. Their lines are still printed; a FAIL there does not fail the run.
const std::set<std::string> kDisproved{"removal_monotone_with_depletion"};

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> checks{
      {"fee_arithmetic", fee_arithmetic},
      {"table_algebra", table_algebra},
      {"routing_oracle", routing_oracle},
      {"conservation", conservation},
      {"beta_star_oracle", beta_oracle},
      {"determinism", determinism},
      {"depletion_dominance", depletion_dominance},
      {"removal_monotone_with_depletion", removal_monotone_with_depletion},
      {"ga_contract", ga_contract},
      {"graph_metric_fixtures", graph_metrics},
      {"dataset_reproduction", dataset_reproduction},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = fail(std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = v.kind == Verdict::kPass ? "PASS" : v.kind == Verdict::kFail ? "FAIL" : "SKIP";
    const bool disproved = kDisproved.count(name) != 0;
    if (v.kind == Verdict::kFail && !disproved) ++failures;
    std::cout << fmt::format("{} {} ({:.1f}s): {}{}", tag, name, secs, v.detail,
                             v.kind == Verdict::kFail && disproved ? " [disproved, not counted]" : "")
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
