#include "flowguard/service/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "flowguard/errors.hpp"
#include "flowguard/harness/synth.hpp"
#include "flowguard/service/pipeline.hpp"

namespace flowguard::service {

LatencySummary summarize(std::span<const double> samples_ms) {
  if (samples_ms.empty()) throw InputError("no latency samples");
  std::vector<double> v(samples_ms.begin(), samples_ms.end());
  std::sort(v.begin(), v.end());
  auto rank = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    return v[std::clamp<std::size_t>(k, 1, v.size()) - 1];
  };
  LatencySummary s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.p50 = rank(0.50);
  s.p95 = rank(0.95);
  s.max = v.back();
  return s;
}

BenchReport run_bench(const gnn::Checkpoint& checkpoint, const BenchConfig& config) {
  if (config.graphs == 0) throw ConfigError("bench needs at least one graph");
  if (config.nodes < 2) throw ConfigError("bench graphs need at least two nodes");

  SplitMix64 rng(config.seed);
  std::vector<std::string> fixtures;
  AccountDb accounts;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < config.graphs; ++i) {
    auto r = harness::random_transaction(rng, config.nodes, config.extra_transfers);
    edges += r.tx.traces.size() + r.tx.logs.size();
    fixtures.push_back(serialize_fixture(r.tx));
    // Random addresses do not collide across graphs, so one shared table
    // reproduces every per-graph table.
    for (const auto& t : r.tx.traces) {
      for (const auto& a : {t.caller, t.callee})
        if (auto v = r.accounts.lookup(a)) accounts.insert(a, *v);
    }
    for (const auto& l : r.tx.logs) {
      for (std::size_t k = 1; k < 3; ++k) {
        Address a;
        std::copy(l.topics[k].bytes.begin() + 12, l.topics[k].bytes.end(), a.bytes.begin());
        if (auto v = r.accounts.lookup(a)) accounts.insert(a, *v);
      }
    }
  }

  const Classifier classifier(checkpoint, std::move(accounts));
  std::vector<double> classify, total;
  for (const auto& f : fixtures) {
    const auto resp = classifier.classify_fixture(f);
    classify.push_back(resp.timing.classify_ms);
    total.push_back(resp.timing.total_ms);
  }

  BenchReport report;
  report.graphs = config.graphs;
  report.nodes = config.nodes;
  report.mean_edges = static_cast<double>(edges) / static_cast<double>(config.graphs);
  report.classify_ms = summarize(classify);
  report.total_ms = summarize(total);
  return report;
}

std::string bench_report_text(const BenchReport& r) {
  auto line = [](const char* name, const LatencySummary& s) {
    return fmt::format("{:<12} mean={:.4f} p50={:.4f} p95={:.4f} max={:.4f}\n", name, s.mean, s.p50, s.p95, s.max);
  };
  return fmt::format("graphs={} nodes={} mean_edges={:.1f}\n", r.graphs, r.nodes, r.mean_edges) +
         line("classify_ms", r.classify_ms) + line("total_ms", r.total_ms);
}

}  // namespace flowguard::service
