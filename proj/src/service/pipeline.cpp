#include "flowguard/service/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "flowguard/errors.hpp"
#include "flowguard/harness/dataset.hpp"
#include "flowguard/txparse.hpp"

namespace flowguard::service {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

namespace {

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

template <class F>
auto in_phase(const char* phase, F&& f) {
  try {
    return f();
  } catch (const PhaseError&) {
    throw;
  } catch (const Error& e) {
    throw PhaseError(phase, e.kind(), e.what());
  } catch (const std::exception& e) {
    throw PhaseError(phase, "InternalError", e.what());
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  return to_hex(std::span<const std::uint8_t>(md, len));
}

template <class T>
T field(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw SchemaError(path + "." + key, "missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(path + "." + key, "wrong type");
  }
}

}  // namespace

std::string response_to_json(const ClassifyResponse& r) {
  json j = {
      {"tx_hash", r.tx_hash},
      {"prediction", r.prediction},
      {"score", r.score},
      {"timing",
       {{"parse_ms", r.timing.parse_ms},
        {"build_ms", r.timing.build_ms},
        {"classify_ms", r.timing.classify_ms},
        {"total_ms", r.timing.total_ms}}},
      {"graph_stats",
       {{"node_count", r.graph_stats.node_count},
        {"edge_count", r.graph_stats.edge_count},
        {"asset_count", r.graph_stats.asset_count},
        {"max_node_degree", r.graph_stats.max_node_degree}}},
      {"no_transfers", r.no_transfers},
      {"diagnostics", r.diagnostics},
  };
  return j.dump();
}

ClassifyResponse response_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  ClassifyResponse r;
  r.tx_hash = field<std::string>(j, "tx_hash", "$");
  r.prediction = field<int>(j, "prediction", "$");
  r.score = field<double>(j, "score", "$");
  const auto timing = field<json>(j, "timing", "$");
  r.timing.parse_ms = field<double>(timing, "parse_ms", "$.timing");
  r.timing.build_ms = field<double>(timing, "build_ms", "$.timing");
  r.timing.classify_ms = field<double>(timing, "classify_ms", "$.timing");
  r.timing.total_ms = field<double>(timing, "total_ms", "$.timing");
  const auto stats = field<json>(j, "graph_stats", "$");
  r.graph_stats.node_count = field<std::size_t>(stats, "node_count", "$.graph_stats");
  r.graph_stats.edge_count = field<std::size_t>(stats, "edge_count", "$.graph_stats");
  r.graph_stats.asset_count = field<std::size_t>(stats, "asset_count", "$.graph_stats");
  r.graph_stats.max_node_degree = field<std::size_t>(stats, "max_node_degree", "$.graph_stats");
  if (j.contains("no_transfers")) r.no_transfers = field<bool>(j, "no_transfers", "$");
  if (j.contains("diagnostics")) r.diagnostics = field<std::vector<std::string>>(j, "diagnostics", "$");
  return r;
}

Classifier::Classifier(gnn::Checkpoint checkpoint, AccountDb accounts)
    : checkpoint_(std::move(checkpoint)), accounts_(std::move(accounts)) {
  for (int c : checkpoint_.feature_columns)
    if (c < 0 || c >= feature_col::kWidth) throw ConfigError("checkpoint feature column out of range");
  if (static_cast<int>(checkpoint_.feature_columns.size()) != checkpoint_.params.config.input_dim)
    throw ConfigError("checkpoint feature columns do not match the model input width");
  digest_ = sha256_hex(gnn::checkpoint_to_json(checkpoint_));
}

Classifier Classifier::load(const std::filesystem::path& model,
                            const std::optional<std::filesystem::path>& accounts) {
  return Classifier(gnn::load_checkpoint(model), accounts ? AccountDb::load(*accounts) : AccountDb{});
}

gnn::Prediction Classifier::classify_graph(const CashFlowGraph& featurized) const {
  return gnn::infer(harness::select_columns(featurized, checkpoint_.feature_columns), checkpoint_.params);
}

ClassifyResponse Classifier::finish(const RawTransaction& tx, const TransferExtraction& extraction,
                                    Clock::time_point start, double parse_ms) const {
  ClassifyResponse r;
  r.tx_hash = tx.tx_hash.hex();
  r.timing.parse_ms = parse_ms;
  for (const auto& d : extraction.malformed_events)
    r.diagnostics.push_back(fmt::format("log {}: {}", d.log_index, d.message));

  if (extraction.transfers.empty()) {
    r.no_transfers = true;
    r.timing.total_ms = ms_since(start);
    return r;
  }

  auto t = Clock::now();
  const auto featurized = in_phase("build", [&] {
    return assemble_features(construct_graph(extraction.transfers), accounts_);
  });
  r.graph_stats = graph_stats(featurized);
  r.timing.build_ms = ms_since(t);

  t = Clock::now();
  const auto p = in_phase("classify", [&] { return classify_graph(featurized); });
  r.timing.classify_ms = ms_since(t);
  r.prediction = p.label;
  r.score = p.score;
  r.timing.total_ms = ms_since(start);
  return r;
}

ClassifyResponse Classifier::classify_transaction(const RawTransaction& tx) const {
  const auto start = Clock::now();
  const auto extraction = in_phase("parse", [&] { return extract_transfers_detailed(tx); });
  return finish(tx, extraction, start, ms_since(start));
}

ClassifyResponse Classifier::classify_fixture(std::string_view fixture) const {
  const auto start = Clock::now();
  const auto tx = in_phase("parse", [&] { return parse_fixture(fixture); });
  const auto extraction = in_phase("parse", [&] { return extract_transfers_detailed(tx); });
  return finish(tx, extraction, start, ms_since(start));
}

ClassifyResponse Classifier::classify_remote(const std::string& endpoint, std::string_view tx_hash,
                                             const RpcOptions& options) const {
  const auto start = Clock::now();
  const auto tx = in_phase("parse", [&] {
    auto hash = Word32::from_hex(tx_hash);
    if (!hash) throw InputError("transaction hash must be 0x followed by 64 hex digits");
    return RpcClient(endpoint, options).fetch_transaction(*hash);
  });
  const auto extraction = in_phase("parse", [&] { return extract_transfers_detailed(tx); });
  return finish(tx, extraction, start, ms_since(start));
}

std::string Classifier::identity_json() const {
  const auto ckpt = json::parse(gnn::checkpoint_to_json(checkpoint_));
  json j = {
      {"status", "ok"},
      {"config", ckpt.at("config")},
      {"seed", checkpoint_.params.seed},
      {"feature_columns", checkpoint_.feature_columns},
      {"checkpoint_sha256", digest_},
      {"known_accounts", accounts_.size()},
  };
  return j.dump();
}

}  // namespace flowguard::service
