#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "flowguard/gnn/checkpoint.hpp"

namespace flowguard::service {

struct BenchConfig {
  std::size_t graphs = 1000;
  std::size_t nodes = 100;
  // Random transfers on top of the nodes - 1 that connect the accounts.
  std::size_t extra_transfers = 100;
  std::uint64_t seed = 1;
};

struct LatencySummary {
  double mean = 0;
  double p50 = 0;
  double p95 = 0;
  double max = 0;
};

// Nearest-rank percentiles. Throws InputError on empty input.
LatencySummary summarize(std::span<const double> samples_ms);

struct BenchReport {
  std::size_t graphs = 0;
  std::size_t nodes = 0;
  double mean_edges = 0;
  LatencySummary classify_ms;  // model phase only
  LatencySummary total_ms;     // parse + build + featurize + classify
};

// Generates the fixtures up front, loads the model once, then runs every
// fixture through the full pipeline.
BenchReport run_bench(const gnn::Checkpoint& checkpoint, const BenchConfig& config);
std::string bench_report_text(const BenchReport& r);

}  // namespace flowguard::service
