#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flowguard/cashflow.hpp"
#include "flowguard/features.hpp"
#include "flowguard/gnn/checkpoint.hpp"
#include "flowguard/rpc_client.hpp"

namespace flowguard::service {

// Wall-clock milliseconds on a monotonic clock. parse covers decoding (or
// fetching) the transaction and transfer extraction; build covers graph
// construction and feature assembly; classify is the model forward pass.
struct TimingReport {
  double parse_ms = 0;
  double build_ms = 0;
  double classify_ms = 0;
  double total_ms = 0;
};

struct ClassifyResponse {
  std::string tx_hash;
  int prediction = 0;
  double score = 0;
  TimingReport timing;
  GraphStats graph_stats;
  // The transaction moved no value; prediction is 0 by rule, not by model.
  bool no_transfers = false;
  // Transfer events that were skipped as malformed.
  std::vector<std::string> diagnostics;
};

std::string response_to_json(const ClassifyResponse& r);
ClassifyResponse response_from_json(std::string_view text);  // throws ParseError / SchemaError

// A library error tagged with the pipeline phase that raised it:
// "parse", "build" or "classify".
class PhaseError : public std::runtime_error {
 public:
  PhaseError(std::string phase, std::string kind, const std::string& message)
      : std::runtime_error(phase + ": " + kind + ": " + message), phase_(std::move(phase)), kind_(std::move(kind)),
        message_(message) {}
  const std::string& phase() const noexcept { return phase_; }
  const std::string& kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string phase_, kind_, message_;
};

// Immutable after construction; safe to share across threads.
class Classifier {
 public:
  Classifier(gnn::Checkpoint checkpoint, AccountDb accounts);
  static Classifier load(const std::filesystem::path& model, const std::optional<std::filesystem::path>& accounts);

  // Throws PhaseError.
  ClassifyResponse classify_fixture(std::string_view fixture) const;
  ClassifyResponse classify_remote(const std::string& endpoint, std::string_view tx_hash,
                                   const RpcOptions& options = {}) const;
  ClassifyResponse classify_transaction(const RawTransaction& tx) const;

  // Model forward pass on an already featurized graph (full 8-column layout).
  gnn::Prediction classify_graph(const CashFlowGraph& featurized) const;

  const gnn::Checkpoint& checkpoint() const noexcept { return checkpoint_; }
  const AccountDb& accounts() const noexcept { return accounts_; }
  // Hex SHA-256 of the canonical checkpoint document.
  const std::string& checkpoint_digest() const noexcept { return digest_; }
  // Model configuration, seed, feature columns and digest as JSON.
  std::string identity_json() const;

 private:
  ClassifyResponse finish(const RawTransaction& tx, const TransferExtraction& extraction,
                          std::chrono::steady_clock::time_point start, double parse_ms) const;

  gnn::Checkpoint checkpoint_;
  AccountDb accounts_;
  std::string digest_;
};

}  // namespace flowguard::service
