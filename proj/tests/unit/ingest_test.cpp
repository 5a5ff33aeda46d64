#include <gtest/gtest.h>

#include <sstream>

#include "lnsim/csv.hpp"
#include "lnsim/ingest.hpp"
#include "testkit.hpp"

namespace lnsim {
namespace {

namespace fs = std::filesystem;
using testkit::write_file;

constexpr const char* kHeader = "snapshot_id,channel_id,src,trg,capacity_sat,base_fee_msat,fee_rate_ppm,disabled\n";

TEST(Csv, QuotesCommentsAndCrlf) {
  const auto r = csv::Reader::from_string("a,b\r\n# note\n\n\"x,1\",\"say \"\"hi\"\"\"\r\n2,3\n");
  ASSERT_EQ(r.header().size(), 2u);
  ASSERT_EQ(r.records().size(), 2u);
  EXPECT_EQ(r.records()[0].fields[0], "x,1");
  EXPECT_EQ(r.records()[0].fields[1], "say \"hi\"");
  EXPECT_EQ(r.records()[1].line, 5u);
  EXPECT_EQ(r.parse_int(r.records()[1], 1, "b"), 3);
  EXPECT_THROW(r.column("missing"), ParseError);
}

TEST(Csv, EscapeAndFormat) {
  EXPECT_EQ(csv::escape("plain"), "plain");
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("q\""), "\"q\"\"\"");
  EXPECT_EQ(csv::format_sat(70'000), "70.0");
  EXPECT_EQ(csv::format_sat(1'050), "1.1");
  EXPECT_EQ(csv::format_sat(1'049), "1.0");
  EXPECT_EQ(csv::format_sat(-1'050), "-1.1");
}

TEST(Ingest, CapacityFilter) {
  const auto rows = parse_canonical_csv(std::string(kHeader) + "d,c1,a,b,50000,0,0,0\nd,c1,b,a,50000,0,0,0\n");
  LoadOptions o;
  o.min_capacity_sat = 60'000;
  EXPECT_EQ(SnapshotGraph::from_rows("d", rows, o).edge_count(), 0u);
  o.min_capacity_sat = 50'000;
  EXPECT_EQ(SnapshotGraph::from_rows("d", rows, o).edge_count(), 2u);
}

TEST(Ingest, ChannelGivesTwoDirectedEdges) {
  const auto rows = parse_canonical_csv(std::string(kHeader) + "d,c1,a,b,100000,1000,1,0\nd,c1,b,a,100000,0,5,0\n");
  const auto g = SnapshotGraph::from_rows("d", rows, {});
  ASSERT_EQ(g.edge_count(), 2u);
  ASSERT_EQ(g.channel_count(), 1u);
  for (const auto& e : g.edges()) {
    EXPECT_EQ(e.capacity_sat, 100'000);
    if (g.node_id(e.src) == "a") {
      EXPECT_EQ(e.policy.base_fee_msat, 1000);
    } else {
      EXPECT_EQ(e.policy.fee_rate_ppm, 5);
    }
  }
}

TEST(Ingest, DisabledDirectionsDropped) {
  const auto rows = parse_canonical_csv(std::string(kHeader) + "d,c1,a,b,100000,0,0,1\nd,c1,b,a,100000,0,0,0\n");
  const auto g = SnapshotGraph::from_rows("d", rows, {});
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.node_id(g.edge(0).src), "b");
  LoadOptions keep;
  keep.keep_disabled = true;
  EXPECT_EQ(SnapshotGraph::from_rows("d", rows, keep).edge_count(), 2u);
}

TEST(Ingest, ParallelChannelsKeptApart) {
  const auto rows = parse_canonical_csv(std::string(kHeader) +
                                        "d,c1,a,b,100000,0,0,0\nd,c2,a,b,200000,0,0,0\nd,c2,b,a,200000,0,0,0\n");
  const auto g = SnapshotGraph::from_rows("d", rows, {});
  EXPECT_EQ(g.channel_count(), 2u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.channel_degree(*g.find_node("a")), 2u);
}

TEST(Ingest, IsolatedNodesListed) {
  const auto rows = parse_canonical_csv(std::string(kHeader) + "d,,z,,,,,\nd,c1,a,b,100000,0,0,0\n");
  const auto g = SnapshotGraph::from_rows("d", rows, {});
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_TRUE(g.find_node("z").has_value());
}

TEST(Ingest, Errors) {
  EXPECT_THROW(parse_canonical_csv(std::string(kHeader) + "d,c1,a,b,notanumber,0,0,0\n"), ParseError);
  try {
    parse_canonical_csv(std::string(kHeader) + "d,c1,a,b,1,0,0,0\nd,c2,a,b,1,x,0,0\n", "f.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "f.csv");
    EXPECT_EQ(e.line(), 3u);
  }
  const auto dup = parse_canonical_csv(std::string(kHeader) + "d,c1,a,b,1,0,0,0\nd,c1,a,b,1,0,0,0\n");
  EXPECT_THROW(SnapshotGraph::from_rows("d", dup, {}), ValidationError);
  const auto loop = parse_canonical_csv(std::string(kHeader) + "d,c1,a,a,1,0,0,0\n");
  EXPECT_THROW(SnapshotGraph::from_rows("d", loop, {}), ValidationError);
  const auto mismatch = parse_canonical_csv(std::string(kHeader) + "d,c1,a,b,1,0,0,0\nd,c1,b,a,2,0,0,0\n");
  EXPECT_THROW(SnapshotGraph::from_rows("d", mismatch, {}), ValidationError);
  EXPECT_THROW(load_snapshot("/nonexistent/x.csv", LoadOptions{}), ParseError);
}

TEST(Ingest, TargetConventionSwapsPolicies) {
  const auto rows = parse_canonical_csv(std::string(kHeader) + "d,c1,a,b,100000,7,0,0\n");
  LoadOptions o;
  o.convention = PolicyConvention::kTarget;
  const auto g = SnapshotGraph::from_rows("d", rows, o);
  // a->b now carries b's (missing) advertisement; b->a carries a's.
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.node_id(g.edge(0).src), "b");
  EXPECT_EQ(g.edge(0).policy.base_fee_msat, 7);
}

TEST(Ingest, LoadingTwiceIsIdempotent) {
  const auto dir = testkit::temp_dir("ingest-idem");
  const auto g = testkit::ln_like_graph(5, 40, 3);
  std::vector<CanonicalRow> rows;
  for (const auto& e : g.edges()) {
    rows.push_back({"day0", g.channel_id(static_cast<EdgeIndex>(&e - g.edges().data())), g.node_id(e.src),
                    g.node_id(e.trg), e.capacity_sat, e.policy, 0});
  }
  std::ostringstream s;
  write_canonical_csv(s, rows);
  write_file(dir / "day0.csv", s.str());
  const auto a = load_snapshot((dir / "day0.csv").string(), 0, false);
  const auto b = load_snapshot((dir / "day0.csv").string(), 0, false);
  EXPECT_TRUE(a == b);
  for (const auto& e : a.edges()) EXPECT_FALSE(e.policy.disabled);
}

TEST(Ingest, SnapshotsFromDirectorySorted) {
  const auto dir = testkit::temp_dir("ingest-dir");
  write_file(dir / "b.csv", std::string(kHeader) + "day2,c1,a,b,100000,0,0,0\n");
  write_file(dir / "a.csv", std::string(kHeader) + "day1,c1,a,b,100000,0,0,0\nday1b,c9,x,y,100000,0,0,0\n");
  write_file(dir / "ignored.txt", "junk");
  const auto snaps = load_snapshots(dir.string(), {});
  ASSERT_EQ(snaps.size(), 3u);
  EXPECT_EQ(snaps[0].snapshot_id(), "day1");
  EXPECT_EQ(snaps[1].snapshot_id(), "day1b");
  EXPECT_EQ(snaps[2].snapshot_id(), "day2");
}

const char* kDump = R"({
  "nodes": [{"pub_key": "a", "alias": "A"}, {"pub_key": "b", "alias": "B"}, {"pub_key": "c", "alias": "C"}],
  "edges": [
    {"channel_id": "100", "node1_pub": "a", "node2_pub": "b", "capacity": "100000",
     "node1_policy": {"fee_base_msat": "1000", "fee_rate_milli_msat": "1", "disabled": false},
     "node2_policy": {"fee_base_msat": "2000", "fee_rate_milli_msat": "3", "disabled": false}},
    {"channel_id": "200", "node1_pub": "b", "node2_pub": "c", "capacity": 300000,
     "node1_policy": {"fee_base_msat": 5, "fee_rate_milli_msat": 0, "disabled": false},
     "node2_policy": null}
  ]
})";

TEST(Gossip, ConvertsDirections) {
  const auto rows = convert_gossip_dump_text(kDump, "d");
  std::size_t channel_rows = 0, disabled = 0;
  for (const auto& r : rows) {
    if (r.is_isolated_node()) continue;
    ++channel_rows;
    if (r.policy.disabled) ++disabled;
    if (r.channel_id == "100" && r.src == "a") {
      EXPECT_EQ(r.policy.base_fee_msat, 1000);
    }
    if (r.channel_id == "100" && r.src == "b") {
      EXPECT_EQ(r.policy.fee_rate_ppm, 3);
    }
  }
  EXPECT_EQ(channel_rows, 4u);
  EXPECT_EQ(disabled, 1u);
  EXPECT_THROW(convert_gossip_dump_text("{]", "d"), ParseError);
  EXPECT_THROW(convert_gossip_dump_text("{\"nodes\": []}", "d"), ParseError);
}

TEST(Gossip, RoundTripEqualsHandWrittenTable) {
  const auto dir = testkit::temp_dir("gossip-rt");
  write_file(dir / "d.json", kDump);
  write_file(dir / "d.csv", std::string(kHeader) +
                                "d,100,a,b,100000,1000,1,0\nd,100,b,a,100000,2000,3,0\n"
                                "d,200,b,c,300000,5,0,0\nd,200,c,b,300000,0,0,1\n");
  const auto from_json = load_snapshot((dir / "d.json").string(), 0, false);
  const auto from_csv = load_snapshot((dir / "d.csv").string(), 0, false);
  EXPECT_EQ(from_json.edge_count(), 3u);
  EXPECT_TRUE(from_json == from_csv);
}

TEST(Labels, MerchantsEntitiesStream) {
  const auto dir = testkit::temp_dir("labels");
  write_file(dir / "m.csv", "pub_key,tag\na,shop\nb,shop\na,cafe\n");
  EXPECT_EQ(load_merchants((dir / "m.csv").string()).size(), 2u);

  write_file(dir / "e.csv", "pub_key,entity_name\n");
  const auto empty = load_entities((dir / "e.csv").string());
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(empty.entity_of("q"), "q");

  write_file(dir / "e2.csv", "pub_key,entity_name\nn1,BIG\nn2,BIG\nn3,small\n");
  const auto ents = load_entities((dir / "e2.csv").string());
  EXPECT_EQ(ents.members("BIG"), (std::vector<std::string>{"n1", "n2"}));
  EXPECT_EQ(ents.entity_of("n3"), "small");
  write_file(dir / "e3.csv", "pub_key,entity_name\nn1,BIG\nn1,other\n");
  EXPECT_THROW(load_entities((dir / "e3.csv").string()), ParseError);

  write_file(dir / "s.csv", "channel_id,src,trg,capacity_sat,open_block,close_block\n"
                            "c2,a,b,10,200,\nc1,b,c,10,100,150\nc3,a,c,10,150,\n");
  const auto stream = load_edge_stream((dir / "s.csv").string());
  ASSERT_EQ(stream.size(), 3u);
  EXPECT_EQ(stream[0].channel_id, "c1");
  EXPECT_EQ(stream[2].channel_id, "c2");
  EXPECT_FALSE(stream[2].close_block.has_value());
  write_file(dir / "bad.csv", "channel_id,src,trg,capacity_sat,open_block,close_block\nc,a,b,1,10,5\n");
  EXPECT_THROW(load_edge_stream((dir / "bad.csv").string()), ValidationError);
}

TEST(Labels, MerchantFlagsIgnoreUnknownIds) {
  auto g = testkit::build({testkit::ChannelSpec{"a", "b"}});
  g.label_merchants({"a", "ghost"});
  ASSERT_EQ(g.merchants().size(), 1u);
  EXPECT_TRUE(g.is_merchant(*g.find_node("a")));
}

}  // namespace
}  // namespace lnsim
