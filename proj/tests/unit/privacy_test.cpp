#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "lnsim/privacy.hpp"
#include "testkit.hpp"

namespace lnsim {
namespace {

using testkit::ChannelSpec;

PaymentOutcome hops(int k) {
  PaymentOutcome o;
  o.status = PaymentStatus::kSuccess;
  o.edges.assign(static_cast<std::size_t>(k), 0);
  return o;
}

TEST(SingleHop, Denominators) {
  std::vector<PaymentOutcome> direct{hops(1), hops(1)};
  EXPECT_DOUBLE_EQ(*single_hop_fraction(direct).of_all, 0.0);
  EXPECT_FALSE(single_hop_fraction(direct).of_routed.has_value());
  std::vector<PaymentOutcome> two{hops(2), hops(2)};
  EXPECT_DOUBLE_EQ(*single_hop_fraction(two).of_all, 1.0);
  std::vector<PaymentOutcome> mix{hops(1), hops(2), hops(3), hops(2), PaymentOutcome{}};
  const auto f = single_hop_fraction(mix);
  EXPECT_DOUBLE_EQ(*f.of_all, 0.5);
  EXPECT_DOUBLE_EQ(*f.of_routed, 2.0 / 3.0);
  const auto g = single_hop_fraction(path_length_stats(mix));
  EXPECT_EQ(g.of_all, f.of_all);
  EXPECT_EQ(g.of_routed, f.of_routed);
  EXPECT_FALSE(single_hop_fraction(std::vector<PaymentOutcome>{PaymentOutcome{}}).of_all.has_value());
}

TEST(Plausibility, Definition) {
  // Square a-b-c-d-a: every node has exactly two qualifying channels.
  const auto g = testkit::build({{"a", "b", 100}, {"b", "c", 100}, {"c", "d", 100}, {"d", "a", 100}, {"a", "c", 10}});
  const std::vector<int> th{0, 1, 2, 5};
  const auto c = plausibility_curve(g, 50, th);
  ASSERT_EQ(c.points.size(), 4u);
  EXPECT_DOUBLE_EQ(c.points[0].second, 1.0);
  EXPECT_DOUBLE_EQ(c.points[1].second, 1.0);
  EXPECT_DOUBLE_EQ(c.points[2].second, 0.0);
  EXPECT_DOUBLE_EQ(c.points[3].second, 0.0);
  EXPECT_DOUBLE_EQ(plausibility_curve(g, 5, th).points[2].second, 0.5);
  const std::vector<int> bad{2, 1};
  EXPECT_THROW(plausibility_curve(g, 5, bad), std::invalid_argument);
}

TEST(Plausibility, MonotoneInThresholdAndAmount) {
  const auto g = testkit::ln_like_graph(8, 120, 4);
  const std::vector<int> th{0, 1, 2, 3, 5, 8, 13};
  PlausibilityCurve prev;
  for (const Satoshi amount : {1'000, 60'000, 100'000, 500'000, 5'000'000}) {
    const auto c = plausibility_curve(g, amount, th);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      EXPECT_GE(c.points[i].second, 0.0);
      EXPECT_LE(c.points[i].second, 1.0);
      if (i > 0) {
        EXPECT_LE(c.points[i].second, c.points[i - 1].second);
      }
      if (!prev.points.empty()) {
        EXPECT_LE(c.points[i].second, prev.points[i].second);
      }
    }
    prev = c;
  }
}

TEST(GAParams, Validation) {
  GAParams p;
  EXPECT_NO_THROW(p.validate());
  p.population_size = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.target_length = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.elite_count = 50;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

BalanceState half_split(const SnapshotGraph& g) {
  std::vector<Satoshi> fwd;
  for (const auto& c : g.channels()) fwd.push_back(c.capacity_sat / 2);
  return BalanceState(g, fwd);
}

TEST(Lengthened, TriangleDetour) {
  const auto g = testkit::build({{"s", "t"}, {"s", "w"}, {"w", "t"}});
  const auto st = half_split(g);
  GAParams ga;
  ga.target_length = 2;
  ga.seed = 1;
  const auto o = lengthened_path(g, st, *g.find_node("s"), *g.find_node("t"), 1000, ga);
  ASSERT_TRUE(o.ok());
  std::vector<std::string> names;
  for (const auto v : o.path) names.push_back(g.node_id(v));
  EXPECT_EQ(names, (std::vector<std::string>{"s", "w", "t"}));
  ga.target_length = 3;
  EXPECT_FALSE(lengthened_path(g, st, *g.find_node("s"), *g.find_node("t"), 1000, ga).ok());
}

TEST(Lengthened, BaselineLengthKeepsBaseline) {
  for (int seed = 0; seed < 20; ++seed) {
    const auto g = testkit::ln_like_graph(300 + seed, 50, 3);
    Rng rng(seed);
    const auto st = init_balances(g, rng);
    Router router(g);
    for (int k = 0; k < 10; ++k) {
      const auto s = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
      const auto t = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
      if (s == t) continue;
      const auto base = router.route(st, s, t, 20'000, {});
      if (!base.ok()) continue;
      GAParams ga;
      ga.target_length = base.hop_count();
      ga.seed = static_cast<std::uint64_t>(k);
      const auto o = lengthened_path(g, st, s, t, 20'000, ga);
      ASSERT_TRUE(o.ok());
      EXPECT_EQ(o.total_fee_msat, base.total_fee_msat);
      EXPECT_EQ(o.hop_count(), base.hop_count());
    }
  }
}

TEST(Lengthened, ContractAndDeterminism) {
  const auto g = testkit::ln_like_graph(77, 80, 4);
  Rng rng(5);
  const auto st = init_balances(g, rng);
  Router router(g);
  int found = 0;
  int exists = 0;
  for (int k = 0; k < 40; ++k) {
    const auto s = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
    const auto t = static_cast<NodeIndex>(rng.uniform_below(g.node_count()));
    if (s == t) continue;
    const auto base = router.route(st, s, t, 20'000, {});
    for (int L = 1; L <= 6; ++L) {
      GAParams ga;
      ga.target_length = L;
      ga.seed = static_cast<std::uint64_t>(k * 10 + L);
      ga.generations = 40;
      const auto o = lengthened_path(g, st, s, t, 20'000, ga);
      const auto optimum = testkit::brute_force_fixed_length(g, st, s, t, 20'000, L, false);
      if (base.ok() && optimum) ++exists;
      if (!optimum) {
        EXPECT_FALSE(o.ok());
      }
      if (!base.ok()) {
        EXPECT_FALSE(o.ok());
        continue;
      }
      if (!o.ok()) continue;
      ++found;
      EXPECT_EQ(o.hop_count(), L);
      std::set<NodeIndex> seen(o.path.begin(), o.path.end());
      EXPECT_EQ(seen.size(), o.path.size());
      EXPECT_EQ(o.path.front(), s);
      EXPECT_EQ(o.path.back(), t);
      for (const auto e : o.edges) EXPECT_TRUE(st.usable(e, 20'000));
      EXPECT_GE(o.total_fee_msat, base.total_fee_msat);
      EXPECT_GE(o.total_fee_msat, *optimum);
      EXPECT_EQ(path_cost(g, o.edges, 20'000, false).total_msat, o.total_fee_msat);
      const auto again = lengthened_path(g, st, s, t, 20'000, ga);
      EXPECT_EQ(again.edges, o.edges);
    }
  }
  // The search should recover most lengths an exhaustive walk can realise.
  EXPECT_GT(exists, 15);
  EXPECT_GE(found * 10, exists * 8);
}

TEST(CostVsLength, ZeroFeesCostNothing) {
  std::vector<ChannelSpec> ch;
  for (int i = 0; i < 10; ++i) {
    ch.push_back({testkit::node_name(i), testkit::node_name((i + 1) % 10), 1'000'000});
    ch.push_back({testkit::node_name(i), testkit::node_name((i + 3) % 10), 1'000'000});
  }
  const std::vector<SnapshotGraph> snaps{testkit::build(ch)};
  SimParams p;
  p.tau = 100;
  p.runs = 1;
  CostVsLengthOptions o;
  o.lengths = {1, 2, 3};
  o.samples_per_cell = 10;
  o.ga.generations = 30;
  const auto rows = cost_vs_length(snaps, p, o);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].length, 0);
  EXPECT_EQ(rows[0].successes, rows[0].attempts);
  for (const auto& r : rows) {
    EXPECT_EQ(r.mean_cost_sat, 0.0);
    EXPECT_EQ(r.median_cost_sat, 0.0);
    EXPECT_EQ(r.attempts, rows[0].attempts);
  }
}

TEST(CostVsLength, UnreachableLengthGivesNoSuccess) {
  // A path graph: every pair has a single route, so shorter lengths fail.
  std::vector<ChannelSpec> ch;
  for (int i = 0; i < 6; ++i) ch.push_back({testkit::node_name(i), testkit::node_name(i + 1), 1'000'000});
  const std::vector<SnapshotGraph> snaps{testkit::build(ch)};
  SimParams p;
  p.tau = 60;
  p.runs = 1;
  CostVsLengthOptions o;
  o.lengths = {7};
  o.ga.generations = 10;
  const auto rows = cost_vs_length(snaps, p, o);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[1].attempts, 0);
  EXPECT_EQ(rows[1].successes, 0);
  EXPECT_EQ(rows[1].success_rate(), 0.0);
  std::ostringstream out;
  write_cost_vs_length_csv(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "L,mean_cost_sat,median_cost_sat,success_rate");
}

TEST(CostVsLength, WorkerCountDoesNotMatter) {
  const auto snaps = testkit::ln_like_snapshots(41, 2, 40, 3);
  SimParams p;
  p.tau = 80;
  p.runs = 2;
  CostVsLengthOptions o;
  o.lengths = {2, 4};
  o.samples_per_cell = 5;
  o.ga.generations = 20;
  const auto a = cost_vs_length(snaps, p, o);
  o.workers = 4;
  const auto b = cost_vs_length(snaps, p, o);
  std::ostringstream sa, sb;
  write_cost_vs_length_csv(sa, a);
  write_cost_vs_length_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(PrivacyCsv, Headers) {
  PathLengthStats s;
  s.successes = 4;
  s.histogram = {{1, 1}, {2, 3}};
  const std::vector<std::pair<double, PathLengthStats>> by{{0.8, s}};
  std::ostringstream a, b, c;
  write_privacy_csv(a, by);
  write_single_hop_csv(b, by);
  EXPECT_EQ(a.str(), "epsilon,hop_count,fraction\n0.800,1,0.250000\n0.800,2,0.750000\n");
  EXPECT_EQ(b.str().substr(0, b.str().find('\n')), "epsilon,single_hop_of_all,single_hop_of_routed,successes");
  const std::vector<PlausibilityCurve> curves{{60'000, {{0, 0.5}, {1, 0.25}}}};
  write_plausibility_csv(c, curves);
  EXPECT_EQ(c.str().substr(0, c.str().find('\n')), "amount_sat,threshold,fraction");
}

}  // namespace
}  // namespace lnsim
