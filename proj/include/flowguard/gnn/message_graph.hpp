#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "flowguard/cashflow.hpp"

namespace flowguard::gnn {

enum class Direction {
  forward_edges,  // messages flow sender -> receiver only
  symmetrized,    // every transfer also carries a message receiver -> sender
};
std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);  // throws ConfigError

// Message-passing view of a cash flow graph. Parallel transfers stay
// parallel messages; self loops used by GCN/GAT are implicit, not stored.
struct MessageGraph {
  std::size_t num_nodes = 0;
  std::vector<std::uint32_t> src;  // message k flows src[k] -> dst[k]
  std::vector<std::uint32_t> dst;
  std::vector<std::uint32_t> in_degree;   // messages arriving at each node
  std::vector<std::uint32_t> out_degree;  // messages leaving each node
  // CSR over destinations: messages into v are in_index[in_offset[v] .. in_offset[v+1]).
  std::vector<std::uint32_t> in_offset;
  std::vector<std::uint32_t> in_index;

  std::size_t num_messages() const noexcept { return src.size(); }

  static MessageGraph build(const CashFlowGraph& g, Direction direction);
  static MessageGraph from_edges(std::size_t num_nodes, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges,
                                 Direction direction);
};

}  // namespace flowguard::gnn
