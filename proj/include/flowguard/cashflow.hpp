#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "flowguard/txparse.hpp"

namespace flowguard {

using NodeId = std::uint32_t;

// Row-major |V| x k node feature matrix.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct NodeMeta {
  Address address;
  bool operator==(const NodeMeta&) const = default;
};

struct Edge {
  NodeId sender;
  NodeId receiver;
  bool operator==(const Edge&) const = default;
};

struct EdgeMeta {
  AssetId asset;
  U256 amount;
  bool operator==(const EdgeMeta&) const = default;
};

// Directed multigraph of one transaction's asset movements. Nodes are
// accounts in first-appearance order, one edge per transfer.
struct CashFlowGraph {
  std::vector<NodeMeta> nodes;
  std::vector<Edge> edges;
  std::vector<EdgeMeta> edge_meta;  // parallel to edges
  std::optional<FeatureMatrix> features;
  std::optional<int> label;

  std::size_t num_nodes() const noexcept { return nodes.size(); }
  std::size_t num_edges() const noexcept { return edges.size(); }
};

bool operator==(const CashFlowGraph& a, const CashFlowGraph& b);

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t asset_count = 0;
  std::size_t max_node_degree = 0;  // in + out, parallel edges counted
  bool operator==(const GraphStats&) const = default;
};

// Throws EmptyGraph on an empty transfer list.
CashFlowGraph construct_graph(std::span<const Transfer> transfers);
GraphStats graph_stats(const CashFlowGraph& g);

// {nodes:[{address}], edges:[{s,r,asset,amount}], features:[[..]]|null,
// label:0|1|null}; amounts are decimal strings.
std::string graph_to_json(const CashFlowGraph& g);
// Throws ParseError / SchemaError / RangeError, and SchemaError when the
// decoded graph breaks an invariant (dangling endpoint, isolated node).
CashFlowGraph graph_from_json(std::string_view text);

}  // namespace flowguard
