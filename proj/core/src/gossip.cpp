#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "lnsim/ingest.hpp"

namespace lnsim {
namespace {

using nlohmann::json;

// Node clients print 64-bit fields as decimal strings; accept numbers too.
std::int64_t as_int(const json& v, const char* field, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    try {
      std::size_t used = 0;
      const long long x = std::stoll(s, &used);
      if (used == s.size()) return x;
    } catch (const std::exception&) {
    }
  }
  throw ParseError(where, 0, fmt::format("field '{}' is not an integer", field));
}

std::string as_id(const json& v, const char* field, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::uint64_t>());
  throw ParseError(where, 0, fmt::format("field '{}' is not an identifier", field));
}

CanonicalRow direction_row(const std::string& snapshot, const std::string& channel, const std::string& src,
                           const std::string& trg, Satoshi capacity, const json* policy,
                           const std::string& where) {
  CanonicalRow row;
  row.snapshot_id = snapshot;
  row.channel_id = channel;
  row.src = src;
  row.trg = trg;
  row.capacity_sat = capacity;
  if (policy == nullptr || policy->is_null()) {
    row.policy.disabled = true;
    return row;
  }
  if (const auto it = policy->find("fee_base_msat"); it != policy->end()) {
    row.policy.base_fee_msat = as_int(*it, "fee_base_msat", where);
  }
  if (const auto it = policy->find("fee_rate_milli_msat"); it != policy->end()) {
    row.policy.fee_rate_ppm = as_int(*it, "fee_rate_milli_msat", where);
  }
  if (const auto it = policy->find("disabled"); it != policy->end()) {
    row.policy.disabled = it->is_boolean() ? it->get<bool>() : as_int(*it, "disabled", where) != 0;
  }
  return row;
}

}  // namespace

std::vector<CanonicalRow> convert_gossip_dump_text(const std::string& json_text, const std::string& snapshot_id) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(snapshot_id, 0, e.what());
  }
  if (!doc.is_object() || !doc.contains("edges") || !doc["edges"].is_array()) {
    throw ParseError(snapshot_id, 0, "gossip dump needs an 'edges' array");
  }
  std::vector<CanonicalRow> rows;
  std::set<std::string> connected;
  std::size_t index = 0;
  for (const auto& edge : doc["edges"]) {
    const std::string where = fmt::format("{} edges[{}]", snapshot_id, index++);
    if (!edge.is_object()) throw ParseError(where, 0, "edge is not an object");
    for (const char* key : {"channel_id", "node1_pub", "node2_pub", "capacity"}) {
      if (!edge.contains(key)) throw ParseError(where, 0, fmt::format("missing field '{}'", key));
    }
    const std::string channel = as_id(edge["channel_id"], "channel_id", where);
    const std::string n1 = as_id(edge["node1_pub"], "node1_pub", where);
    const std::string n2 = as_id(edge["node2_pub"], "node2_pub", where);
    const Satoshi capacity = as_int(edge["capacity"], "capacity", where);
    const json* p1 = edge.contains("node1_policy") ? &edge["node1_policy"] : nullptr;
    const json* p2 = edge.contains("node2_policy") ? &edge["node2_policy"] : nullptr;
    rows.push_back(direction_row(snapshot_id, channel, n1, n2, capacity, p1, where));
    rows.push_back(direction_row(snapshot_id, channel, n2, n1, capacity, p2, where));
    connected.insert(n1);
    connected.insert(n2);
  }
  if (doc.contains("nodes") && doc["nodes"].is_array()) {
    for (const auto& node : doc["nodes"]) {
      if (!node.is_object() || !node.contains("pub_key")) continue;
      const std::string key = as_id(node["pub_key"], "pub_key", snapshot_id);
      if (connected.count(key) != 0) continue;
      CanonicalRow row;
      row.snapshot_id = snapshot_id;
      row.src = key;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<CanonicalRow> convert_gossip_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return convert_gossip_dump_text(buf.str(), std::filesystem::path(path).stem().string());
}

}  // namespace lnsim
