#include "flowguard/gnn/message_graph.hpp"

#include "flowguard/errors.hpp"

namespace flowguard::gnn {

std::string_view to_string(Direction d) {
  return d == Direction::forward_edges ? "forward_edges" : "symmetrized";
}

Direction direction_from_string(std::string_view s) {
  if (s == "forward_edges" || s == "forward") return Direction::forward_edges;
  if (s == "symmetrized") return Direction::symmetrized;
  throw ConfigError("unknown message direction '" + std::string(s) + "'");
}

MessageGraph MessageGraph::from_edges(std::size_t num_nodes,
                                      std::span<const std::pair<std::uint32_t, std::uint32_t>> edges,
                                      Direction direction) {
  MessageGraph m;
  m.num_nodes = num_nodes;
  const std::size_t count = edges.size() * (direction == Direction::symmetrized ? 2 : 1);
  m.src.reserve(count);
  m.dst.reserve(count);
  for (const auto& [s, r] : edges) {
    if (s >= num_nodes || r >= num_nodes) throw ShapeError("edge endpoint out of range");
    m.src.push_back(s);
    m.dst.push_back(r);
    if (direction == Direction::symmetrized) {
      m.src.push_back(r);
      m.dst.push_back(s);
    }
  }
  m.in_degree.assign(num_nodes, 0);
  m.out_degree.assign(num_nodes, 0);
  for (std::size_t k = 0; k < m.src.size(); ++k) {
    ++m.out_degree[m.src[k]];
    ++m.in_degree[m.dst[k]];
  }
  m.in_offset.assign(num_nodes + 1, 0);
  for (std::size_t v = 0; v < num_nodes; ++v) m.in_offset[v + 1] = m.in_offset[v] + m.in_degree[v];
  m.in_index.assign(m.src.size(), 0);
  std::vector<std::uint32_t> cursor(m.in_offset.begin(), m.in_offset.end() - 1);
  for (std::size_t k = 0; k < m.src.size(); ++k) m.in_index[cursor[m.dst[k]]++] = static_cast<std::uint32_t>(k);
  return m;
}

MessageGraph MessageGraph::build(const CashFlowGraph& g, Direction direction) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.emplace_back(e.sender, e.receiver);
  return from_edges(g.num_nodes(), edges, direction);
}

}  // namespace flowguard::gnn
