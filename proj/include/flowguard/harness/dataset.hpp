#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flowguard/cashflow.hpp"

namespace flowguard::harness {

struct LabeledGraph {
  std::string id;
  Chain chain = Chain::ethereum;
  CashFlowGraph graph;  // featurized, label set

  int label() const { return graph.label.value_or(0); }
};

using Dataset = std::vector<LabeledGraph>;

// Directory layout: one graph document per transaction plus manifest.csv
// with header "file,label,chain".
void save_dataset(const Dataset& data, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

// Which feature families feed the model.
struct AblationMask {
  bool include_type = true;
  bool include_frequency = true;
  bool include_diversity = true;
  bool include_profit = true;

  // Throws ConfigError when every family is excluded.
  void validate() const;
  // Selected columns of the 8-wide layout, ascending.
  std::vector<int> columns() const;
  int width() const { return static_cast<int>(columns().size()); }

  // Comma-separated family names to drop: "type,frequency,diversity,profit".
  static AblationMask without(const std::string& families);
  std::string name() const;
  bool operator==(const AblationMask&) const = default;
};

// Keeps only `columns` of the feature matrix. Throws FeatureMissing.
CashFlowGraph select_columns(const CashFlowGraph& g, const std::vector<int>& columns);

struct Split {
  std::vector<std::size_t> train;  // ascending dataset indices
  std::vector<std::size_t> test;
};

// Per class, a seeded uniform sample of `train_size_per_class` without
// replacement; everything else is test. Throws ConfigError unless each class
// has more than `train_size_per_class` members.
Split split_dataset(const Dataset& data, int train_size_per_class, std::uint64_t seed);

}  // namespace flowguard::harness
