#include "flowguard/features.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "flowguard/errors.hpp"

namespace flowguard {

using nlohmann::json;

AccountDb AccountDb::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("malformed account database", e.byte);
  }
  if (!doc.is_object()) throw SchemaError("$", "expected an object of address -> verified");
  AccountDb db;
  for (const auto& [key, value] : doc.items()) {
    auto a = Address::from_hex(key);
    if (!a) throw SchemaError("$." + key, "key is not a 20-byte hex address");
    if (!value.is_boolean()) throw SchemaError("$." + key, "expected a boolean");
    db.insert(*a, value.get<bool>());
  }
  return db;
}

AccountDb AccountDb::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open account database '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string AccountDb::to_json() const {
  // Sorted keys so snapshots are byte-stable.
  std::map<std::string, bool> sorted;
  for (const auto& [a, v] : entries_) sorted.emplace(a.hex(), v);
  json doc = json::object();
  for (const auto& [k, v] : sorted) doc[k] = v;
  return doc.dump();
}

std::vector<TypeRow> node_type(const CashFlowGraph& g, const AccountDb& db) {
  std::vector<TypeRow> out;
  out.reserve(g.num_nodes());
  for (const auto& n : g.nodes) {
    const auto verified = db.lookup(n.address);
    if (!verified)
      out.push_back({0, 0, 1});
    else if (*verified)
      out.push_back({0, 1, 0});
    else
      out.push_back({1, 0, 0});
  }
  return out;
}

namespace {

// Divides each count by the column maximum; a direction with no edges at
// all yields zeros.
std::vector<PairRow> normalize_pairs(const std::vector<std::size_t>& in, const std::vector<std::size_t>& out) {
  const auto max_in = in.empty() ? 0 : *std::max_element(in.begin(), in.end());
  const auto max_out = out.empty() ? 0 : *std::max_element(out.begin(), out.end());
  std::vector<PairRow> rows(in.size());
  for (std::size_t v = 0; v < in.size(); ++v) {
    rows[v][0] = max_in == 0 ? 0.0 : static_cast<double>(in[v]) / static_cast<double>(max_in);
    rows[v][1] = max_out == 0 ? 0.0 : static_cast<double>(out[v]) / static_cast<double>(max_out);
  }
  return rows;
}

}  // namespace

std::vector<PairRow> transfer_frequency(const CashFlowGraph& g) {
  std::vector<std::size_t> in(g.num_nodes(), 0), out(g.num_nodes(), 0);
  for (const auto& e : g.edges) {
    ++in[e.receiver];
    ++out[e.sender];
  }
  return normalize_pairs(in, out);
}

std::vector<PairRow> transfer_diversity(const CashFlowGraph& g) {
  std::vector<std::set<AssetId>> in_assets(g.num_nodes()), out_assets(g.num_nodes());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    in_assets[g.edges[i].receiver].insert(g.edge_meta[i].asset);
    out_assets[g.edges[i].sender].insert(g.edge_meta[i].asset);
  }
  std::vector<std::size_t> in(g.num_nodes()), out(g.num_nodes());
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    in[v] = in_assets[v].size();
    out[v] = out_assets[v].size();
  }
  return normalize_pairs(in, out);
}

std::vector<double> profit_score_raw(const CashFlowGraph& g) {
  std::map<AssetId, U256> max_amount;
  for (const auto& m : g.edge_meta) {
    auto& slot = max_amount[m.asset];
    if (m.amount > slot) slot = m.amount;
  }
  std::map<AssetId, double> max_as_double;
  for (const auto& [asset, amount] : max_amount) max_as_double[asset] = u256_to_double(amount);

  std::vector<double> p(g.num_nodes(), 0.0);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& m = g.edge_meta[i];
    const double ratio = u256_to_double(m.amount) / max_as_double.at(m.asset);
    p[g.edges[i].sender] -= ratio;
    p[g.edges[i].receiver] += ratio;
  }
  return p;
}

std::vector<double> profit_score(const CashFlowGraph& g) {
  auto p = profit_score_raw(g);
  for (auto& x : p) x = std::clamp(x, -1.0, 1.0);
  return p;
}

CashFlowGraph assemble_features(const CashFlowGraph& g, const AccountDb& db) {
  if (g.edges.empty()) throw EmptyGraph("cannot extract features from a graph without edges");
  namespace col = feature_col;

  const auto type = node_type(g, db);
  const auto freq = transfer_frequency(g);
  const auto div = transfer_diversity(g);
  const auto profit = profit_score(g);

  FeatureMatrix x(static_cast<Eigen::Index>(g.num_nodes()), col::kWidth);
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    const auto r = static_cast<Eigen::Index>(v);
    x(r, col::kTypeOpaque) = type[v][0];
    x(r, col::kTypeTransparent) = type[v][1];
    x(r, col::kTypeEoa) = type[v][2];
    x(r, col::kFreqIn) = freq[v][0];
    x(r, col::kFreqOut) = freq[v][1];
    x(r, col::kDivIn) = div[v][0];
    x(r, col::kDivOut) = div[v][1];
    x(r, col::kProfit) = profit[v];
  }

  CashFlowGraph out = g;
  out.features = std::move(x);
  return out;
}

}  // namespace flowguard
