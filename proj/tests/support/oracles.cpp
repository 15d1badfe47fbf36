#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

namespace flowguard::testing {

using boost::multiprecision::cpp_int;

std::vector<double> naive_raw_profit(const CashFlowGraph& g) {
  const std::size_t n = g.nodes.size();
  std::map<std::string, cpp_int> biggest;
  for (const auto& m : g.edge_meta) {
    cpp_int a(m.amount);
    auto& slot = biggest[m.asset.to_string()];
    slot = std::max(slot, a);
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& [asset, max_amount] : biggest) {
      cpp_int net = 0;
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (g.edge_meta[e].asset.to_string() != asset) continue;
        if (g.edges[e].receiver == v) net += cpp_int(g.edge_meta[e].amount);
        if (g.edges[e].sender == v) net -= cpp_int(g.edge_meta[e].amount);
      }
      out[v] += static_cast<double>(net) / static_cast<double>(max_amount);
    }
  }
  return out;
}

std::vector<Row8> naive_features(const CashFlowGraph& g, const AccountDb& db) {
  const std::size_t n = g.nodes.size();
  std::vector<double> in_count(n), out_count(n), in_div(n), out_div(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::set<std::string> ins, outs;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      if (g.edges[e].receiver == v) {
        in_count[v] += 1;
        ins.insert(g.edge_meta[e].asset.to_string());
      }
      if (g.edges[e].sender == v) {
        out_count[v] += 1;
        outs.insert(g.edge_meta[e].asset.to_string());
      }
    }
    in_div[v] = static_cast<double>(ins.size());
    out_div[v] = static_cast<double>(outs.size());
  }
  auto normalize = [](std::vector<double>& x) {
    const double m = *std::max_element(x.begin(), x.end());
    for (auto& v : x) v = m > 0 ? v / m : 0.0;
  };
  normalize(in_count);
  normalize(out_count);
  normalize(in_div);
  normalize(out_div);
  const auto raw = naive_raw_profit(g);

  std::vector<Row8> rows(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto verified = db.lookup(g.nodes[v].address);
    rows[v] = {verified && !*verified ? 1.0 : 0.0,
               verified && *verified ? 1.0 : 0.0,
               verified ? 0.0 : 1.0,
               in_count[v],
               out_count[v],
               in_div[v],
               out_div[v],
               std::min(1.0, std::max(-1.0, raw[v]))};
  }
  return rows;
}

std::vector<Transfer> random_transfers(SplitMix64& rng, int max_nodes, int max_edges, int max_assets) {
  const auto nodes = static_cast<int>(rng.between(2, static_cast<std::uint64_t>(max_nodes)));
  const auto edges = static_cast<int>(rng.between(1, static_cast<std::uint64_t>(max_edges)));
  const auto assets = static_cast<int>(rng.between(1, static_cast<std::uint64_t>(max_assets)));
  std::vector<Address> accounts(static_cast<std::size_t>(nodes));
  for (auto& a : accounts)
    for (auto& b : a.bytes) b = static_cast<std::uint8_t>(rng.next());
  std::vector<AssetId> kinds{AssetId::native()};
  while (static_cast<int>(kinds.size()) < assets) {
    Address t;
    for (auto& b : t.bytes) b = static_cast<std::uint8_t>(rng.next());
    kinds.push_back(AssetId::token(t));
  }
  std::vector<Transfer> out;
  for (int e = 0; e < edges; ++e) {
    const auto s = rng.between(0, static_cast<std::uint64_t>(nodes - 1));
    auto r = rng.between(0, static_cast<std::uint64_t>(nodes - 2));
    if (r >= s) ++r;
    // Mix tiny and 256-bit-scale amounts.
    U256 amount = rng.between(1, 1000);
    if (rng.uniform() < 0.3) amount <<= static_cast<unsigned>(rng.between(60, 240));
    out.push_back({accounts[s], accounts[r], kinds[rng.between(0, kinds.size() - 1)], amount});
  }
  return out;
}

AccountDb random_accounts(SplitMix64& rng, const CashFlowGraph& g) {
  AccountDb db;
  for (const auto& n : g.nodes) {
    const double u = rng.uniform();
    if (u < 1.0 / 3) db.insert(n.address, true);
    else if (u < 2.0 / 3) db.insert(n.address, false);
  }
  return db;
}

gnn::Matrix dense_adjacency(const gnn::MessageGraph& g) {
  gnn::Matrix a = gnn::Matrix::Zero(static_cast<Eigen::Index>(g.num_nodes), static_cast<Eigen::Index>(g.num_nodes));
  for (std::size_t m = 0; m < g.src.size(); ++m) a(g.dst[m], g.src[m]) += 1.0;
  return a;
}

gnn::Matrix oracle_gcn(const gnn::MessageGraph& g, const gnn::Matrix& h, const gnn::Matrix& w, const gnn::Matrix& b) {
  const gnn::Matrix a = dense_adjacency(g);
  const auto n = a.rows();
  const Eigen::VectorXd in_deg = a.rowwise().sum().array() + 1.0;
  const Eigen::VectorXd out_deg = a.colwise().sum().transpose().array() + 1.0;
  gnn::Matrix p(n, n);
  for (Eigen::Index v = 0; v < n; ++v)
    for (Eigen::Index u = 0; u < n; ++u)
      p(v, u) = (a(v, u) + (u == v ? 1.0 : 0.0)) / std::sqrt(out_deg(u) * in_deg(v));
  gnn::Matrix out = p * h * w;
  out.rowwise() += b.row(0);
  return out;
}

gnn::Matrix oracle_sage(const gnn::MessageGraph& g, const gnn::Matrix& h, const gnn::Matrix& w_self,
                        const gnn::Matrix& w_neigh, const gnn::Matrix& b) {
  gnn::Matrix a = dense_adjacency(g);
  for (Eigen::Index v = 0; v < a.rows(); ++v) {
    const double d = a.row(v).sum();
    if (d > 0) a.row(v) /= d;
  }
  gnn::Matrix out = h * w_self + a * h * w_neigh;
  out.rowwise() += b.row(0);
  return out;
}

gnn::Matrix oracle_gin(const gnn::MessageGraph& g, const gnn::Matrix& h, const gnn::Matrix& w1, const gnn::Matrix& b1,
                       const gnn::Matrix& w2, const gnn::Matrix& b2, double eps) {
  const gnn::Matrix a = dense_adjacency(g);
  gnn::Matrix inner = ((1.0 + eps) * h + a * h) * w1;
  inner.rowwise() += b1.row(0);
  inner = inner.cwiseMax(0.0);
  gnn::Matrix out = inner * w2;
  out.rowwise() += b2.row(0);
  return out;
}

gnn::Matrix oracle_gat(const gnn::MessageGraph& g, const gnn::Matrix& h, const gnn::Matrix& w,
                       const gnn::Matrix& a_src, const gnn::Matrix& a_dst, double slope) {
  const gnn::Matrix a = dense_adjacency(g);
  const gnn::Matrix z = h * w;
  const auto n = a.rows();
  gnn::Matrix out = gnn::Matrix::Zero(n, z.cols());
  for (Eigen::Index v = 0; v < n; ++v) {
    // Multiplicity-weighted softmax over {u : A(v,u) > 0} plus one self term.
    std::vector<std::pair<Eigen::Index, double>> terms;
    for (Eigen::Index u = 0; u < n; ++u) {
      const double count = a(v, u) + (u == v ? 1.0 : 0.0);
      if (count > 0) terms.emplace_back(u, count);
    }
    std::vector<double> score;
    double top = -INFINITY;
    for (auto [u, c] : terms) {
      double e = z.row(u).dot(a_src.row(0)) + z.row(v).dot(a_dst.row(0));
      e = e > 0 ? e : slope * e;
      score.push_back(e);
      top = std::max(top, e);
    }
    double denom = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) denom += terms[i].second * std::exp(score[i] - top);
    for (std::size_t i = 0; i < terms.size(); ++i)
      out.row(v) += terms[i].second * std::exp(score[i] - top) / denom * z.row(terms[i].first);
  }
  return out;
}

CashFlowGraph permute_graph(const CashFlowGraph& g, SplitMix64& rng) {
  const auto n = g.num_nodes();
  std::vector<NodeId> to_new(n);
  std::iota(to_new.begin(), to_new.end(), 0);
  rng.shuffle(to_new);
  std::vector<std::size_t> edge_order(g.num_edges());
  std::iota(edge_order.begin(), edge_order.end(), 0);
  rng.shuffle(edge_order);

  CashFlowGraph out;
  out.label = g.label;
  out.nodes.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.nodes[to_new[v]] = g.nodes[v];
  for (auto e : edge_order) {
    out.edges.push_back({to_new[g.edges[e].sender], to_new[g.edges[e].receiver]});
    out.edge_meta.push_back(g.edge_meta[e]);
  }
  if (g.features) {
    FeatureMatrix x(g.features->rows(), g.features->cols());
    for (std::size_t v = 0; v < n; ++v) x.row(to_new[v]) = g.features->row(static_cast<Eigen::Index>(v));
    out.features = std::move(x);
  }
  return out;
}

gnn::Matrix random_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  gnn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
  return m;
}

}  // namespace flowguard::testing
