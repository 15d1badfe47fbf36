#include "flowguard/cashflow.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "flowguard/errors.hpp"

namespace flowguard {

using nlohmann::json;

bool operator==(const CashFlowGraph& a, const CashFlowGraph& b) {
  if (a.nodes != b.nodes || a.edges != b.edges || a.edge_meta != b.edge_meta || a.label != b.label) return false;
  if (a.features.has_value() != b.features.has_value()) return false;
  if (!a.features) return true;
  return a.features->rows() == b.features->rows() && a.features->cols() == b.features->cols() &&
         *a.features == *b.features;
}

CashFlowGraph construct_graph(std::span<const Transfer> transfers) {
  if (transfers.empty()) throw EmptyGraph("transaction has no asset transfers");

  CashFlowGraph g;
  std::unordered_map<Address, NodeId> index;
  auto node_of = [&](const Address& a) {
    auto [it, inserted] = index.try_emplace(a, static_cast<NodeId>(g.nodes.size()));
    if (inserted) g.nodes.push_back({a});
    return it->second;
  };

  g.edges.reserve(transfers.size());
  g.edge_meta.reserve(transfers.size());
  for (const auto& t : transfers) {
    const NodeId s = node_of(t.sender);
    const NodeId r = node_of(t.receiver);
    g.edges.push_back({s, r});
    g.edge_meta.push_back({t.asset, t.amount});
  }
  return g;
}

GraphStats graph_stats(const CashFlowGraph& g) {
  GraphStats s;
  s.node_count = g.num_nodes();
  s.edge_count = g.num_edges();
  std::set<AssetId> assets;
  for (const auto& m : g.edge_meta) assets.insert(m.asset);
  s.asset_count = assets.size();
  std::vector<std::size_t> degree(g.num_nodes(), 0);
  for (const auto& e : g.edges) {
    ++degree[e.sender];
    ++degree[e.receiver];
  }
  if (!degree.empty()) s.max_node_degree = *std::max_element(degree.begin(), degree.end());
  return s;
}

std::string graph_to_json(const CashFlowGraph& g) {
  json doc;
  doc["nodes"] = json::array();
  for (const auto& n : g.nodes) doc["nodes"].push_back({{"address", n.address.hex()}});
  doc["edges"] = json::array();
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    doc["edges"].push_back({{"s", g.edges[i].sender},
                            {"r", g.edges[i].receiver},
                            {"asset", g.edge_meta[i].asset.to_string()},
                            {"amount", u256_to_dec(g.edge_meta[i].amount)}});
  if (g.features) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < g.features->rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < g.features->cols(); ++c) row.push_back((*g.features)(r, c));
      rows.push_back(std::move(row));
    }
    doc["features"] = std::move(rows);
  } else {
    doc["features"] = nullptr;
  }
  doc["label"] = g.label ? json(*g.label) : json(nullptr);
  return doc.dump();
}

CashFlowGraph graph_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("malformed graph document", e.byte);
  }
  if (!doc.is_object()) throw SchemaError("$", "top-level value must be an object");

  auto array_at = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_array()) throw SchemaError(std::string("$.") + key, "expected an array");
    return *it;
  };

  CashFlowGraph g;
  const json& nodes = array_at("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto path = "$.nodes[" + std::to_string(i) + "].address";
    if (!nodes[i].is_object() || !nodes[i].contains("address") || !nodes[i]["address"].is_string())
      throw SchemaError(path, "required string field missing");
    auto a = Address::from_hex(nodes[i]["address"].get<std::string>());
    if (!a) throw SchemaError(path, "expected 0x-prefixed 20-byte hex address");
    g.nodes.push_back({*a});
  }

  const json& edges = array_at("edges");
  if (edges.empty()) throw SchemaError("$.edges", "a cash flow graph needs at least one edge");
  std::vector<bool> touched(g.nodes.size(), false);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto path = "$.edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    if (!e.is_object()) throw SchemaError(path, "expected an object");
    for (const char* key : {"s", "r"})
      if (!e.contains(key) || !e[key].is_number_unsigned() || e[key].get<std::uint64_t>() >= g.nodes.size())
        throw SchemaError(path + "." + key, "expected a node index below " + std::to_string(g.nodes.size()));
    if (!e.contains("asset") || !e["asset"].is_string()) throw SchemaError(path + ".asset", "required string field missing");
    auto asset = AssetId::parse(e["asset"].get<std::string>());
    if (!asset) throw SchemaError(path + ".asset", "expected \"native\" or a token address");
    if (!e.contains("amount") || !e["amount"].is_string()) throw SchemaError(path + ".amount", "required string field missing");
    U256 amount;
    switch (parse_u256_dec(e["amount"].get<std::string>(), amount)) {
      case U256ParseStatus::ok: break;
      case U256ParseStatus::overflow: throw RangeError(path + ".amount: value exceeds 2^256-1");
      case U256ParseStatus::malformed: throw SchemaError(path + ".amount", "expected a decimal string");
    }
    if (amount == 0) throw SchemaError(path + ".amount", "edge amounts must be positive");
    const auto s = e["s"].get<NodeId>();
    const auto r = e["r"].get<NodeId>();
    touched[s] = touched[r] = true;
    g.edges.push_back({s, r});
    g.edge_meta.push_back({*asset, amount});
  }
  if (auto it = std::find(touched.begin(), touched.end(), false); it != touched.end())
    throw SchemaError("$.nodes[" + std::to_string(it - touched.begin()) + "]", "node is not on any edge");

  if (auto it = doc.find("features"); it != doc.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != g.nodes.size())
      throw SchemaError("$.features", "expected one row per node");
    const std::size_t width = it->empty() ? 0 : (*it)[0].size();
    FeatureMatrix x(static_cast<Eigen::Index>(g.nodes.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < it->size(); ++r) {
      const json& row = (*it)[r];
      if (!row.is_array() || row.size() != width)
        throw SchemaError("$.features[" + std::to_string(r) + "]", "expected " + std::to_string(width) + " numbers");
      for (std::size_t c = 0; c < width; ++c) {
        if (!row[c].is_number())
          throw SchemaError("$.features[" + std::to_string(r) + "][" + std::to_string(c) + "]", "expected a number");
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
      }
    }
    g.features = std::move(x);
  }

  if (auto it = doc.find("label"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer() || (it->get<int>() != 0 && it->get<int>() != 1))
      throw SchemaError("$.label", "expected 0, 1 or null");
    g.label = it->get<int>();
  }
  return g;
}

}  // namespace flowguard
