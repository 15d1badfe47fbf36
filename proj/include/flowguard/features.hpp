#pragma once

#include <array>
#include <filesystem>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flowguard/cashflow.hpp"

namespace flowguard {

// Known contract accounts: address -> source verified. Absent addresses are
// treated as externally owned accounts.
class AccountDb {
 public:
  AccountDb() = default;

  void insert(const Address& a, bool verified) { entries_[a] = verified; }
  // nullopt when the address is unknown.
  std::optional<bool> lookup(const Address& a) const {
    auto it = entries_.find(a);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t size() const noexcept { return entries_.size(); }

  // Snapshot format: JSON object mapping address -> boolean verified flag.
  static AccountDb from_json(std::string_view text);
  static AccountDb load(const std::filesystem::path& path);
  std::string to_json() const;

 private:
  std::unordered_map<Address, bool> entries_;
};

// Column layout of the assembled feature matrix.
namespace feature_col {
inline constexpr int kTypeOpaque = 0;       // contract, source not verified
inline constexpr int kTypeTransparent = 1;  // contract, source verified
inline constexpr int kTypeEoa = 2;
inline constexpr int kFreqIn = 3;
inline constexpr int kFreqOut = 4;
inline constexpr int kDivIn = 5;
inline constexpr int kDivOut = 6;
inline constexpr int kProfit = 7;
inline constexpr int kWidth = 8;
}  // namespace feature_col

using TypeRow = std::array<double, 3>;
using PairRow = std::array<double, 2>;  // [incoming, outgoing]

std::vector<TypeRow> node_type(const CashFlowGraph& g, const AccountDb& db);
std::vector<PairRow> transfer_frequency(const CashFlowGraph& g);
std::vector<PairRow> transfer_diversity(const CashFlowGraph& g);
// Per-edge normalized flow summed per node, before clamping. Sums to zero
// over the graph up to rounding.
std::vector<double> profit_score_raw(const CashFlowGraph& g);
// profit_score_raw clamped to [-1, 1].
std::vector<double> profit_score(const CashFlowGraph& g);

// Returns a copy of `g` with the |V| x 8 feature matrix attached. Throws
// EmptyGraph for a graph without edges.
CashFlowGraph assemble_features(const CashFlowGraph& g, const AccountDb& db);

}  // namespace flowguard
