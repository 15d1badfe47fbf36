#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "flowguard/errors.hpp"
#include "flowguard/harness/dataset.hpp"
#include "flowguard/service/bench.hpp"
#include "flowguard/service/pipeline.hpp"
#include "helpers.hpp"
#include "mock_rpc.hpp"

using namespace flowguard;
using namespace flowguard::service;
using namespace flowguard::testing;

namespace {

gnn::Checkpoint checkpoint(std::vector<int> columns = {0, 1, 2, 3, 4, 5, 6, 7}) {
  gnn::ModelConfig cfg;
  cfg.input_dim = static_cast<int>(columns.size());
  return {gnn::ModelParams::init(cfg, 42), std::move(columns)};
}

Classifier classifier(std::vector<int> columns = {0, 1, 2, 3, 4, 5, 6, 7}) {
  return Classifier(checkpoint(std::move(columns)), AccountDb::load(data_path("worked_example_accounts.json")));
}

}  // namespace

TEST_CASE("worked example through the pipeline") {
  const auto clf = classifier();
  const auto r = clf.classify_fixture(read_text(data_path("worked_example.json")));
  CHECK(r.graph_stats == GraphStats{5, 7, 2, 4});
  std::string hash = "0x";
  for (int i = 0; i < 32; ++i) hash += "5f";
  CHECK(r.tx_hash == hash);
  CHECK(r.timing.parse_ms > 0);
  CHECK(r.timing.build_ms > 0);
  CHECK(r.timing.classify_ms > 0);
  CHECK(r.timing.total_ms > 0);
  CHECK(r.timing.total_ms >= r.timing.parse_ms + r.timing.build_ms + r.timing.classify_ms - 1e-6);
  CHECK_FALSE(r.no_transfers);
}

TEST_CASE("pipeline prediction equals library composition") {
  const auto clf = classifier({7, 0, 3});
  const auto text = read_text(data_path("worked_example.json"));
  const auto r = clf.classify_fixture(text);
  const auto g = assemble_features(construct_graph(extract_transfers(parse_fixture(text))), clf.accounts());
  const auto p = gnn::infer(harness::select_columns(g, {7, 0, 3}), clf.checkpoint().params);
  CHECK(r.prediction == p.label);
  CHECK(r.score == p.score);
}

TEST_CASE("transfer-free transactions are benign with a flag") {
  const auto r = classifier().classify_fixture(read_text(data_path("no_transfers.json")));
  CHECK(r.no_transfers);
  CHECK(r.prediction == 0);
  CHECK(r.graph_stats == GraphStats{});
}

TEST_CASE("errors carry their phase") {
  const auto clf = classifier();
  try {
    clf.classify_fixture("{not json");
    FAIL("expected PhaseError");
  } catch (const PhaseError& e) {
    CHECK(e.phase() == "parse");
    CHECK(e.kind() == "ParseError");
  }
  try {
    clf.classify_fixture(R"({"tx_hash": "0x12"})");
    FAIL("expected PhaseError");
  } catch (const PhaseError& e) {
    CHECK(e.phase() == "parse");
    CHECK(e.kind() == "SchemaError");
  }
}

TEST_CASE("responses round trip through json") {
  const auto r = classifier().classify_fixture(read_text(data_path("worked_example.json")));
  const auto back = response_from_json(response_to_json(r));
  CHECK(back.tx_hash == r.tx_hash);
  CHECK(back.prediction == r.prediction);
  CHECK(back.score == r.score);
  CHECK(back.graph_stats == r.graph_stats);
  CHECK(back.timing.total_ms == r.timing.total_ms);
  const auto j = nlohmann::json::parse(response_to_json(r));
  for (const char* key : {"tx_hash", "prediction", "score", "timing", "graph_stats"}) CHECK(j.contains(key));
  CHECK_THROWS_AS(response_from_json(R"({"tx_hash": "x"})"), SchemaError);
}

TEST_CASE("remote classification via a mock node") {
  MockRpc node;
  const auto clf = classifier();
  std::string hash = "0x";
  for (int i = 0; i < 32; ++i) hash += "5f";
  const auto remote = clf.classify_remote(node.endpoint(), hash);
  CHECK(remote.graph_stats == GraphStats{5, 7, 2, 4});
  node.results["eth_getTransactionReceipt"] = nullptr;
  try {
    clf.classify_remote(node.endpoint(), hash);
    FAIL("expected PhaseError");
  } catch (const PhaseError& e) {
    CHECK(e.kind() == "NotFound");
  }
  CHECK_THROWS_AS(clf.classify_remote(node.endpoint(), "0x12"), PhaseError);
}

TEST_CASE("identity document") {
  const auto clf = classifier();
  const auto j = nlohmann::json::parse(clf.identity_json());
  CHECK(j.at("config").at("arch") == "graphsage");
  CHECK(j.at("seed") == 42);
  CHECK(j.at("checkpoint_sha256").get<std::string>().size() >= 64);
  CHECK(clf.checkpoint_digest() == classifier().checkpoint_digest());
}

TEST_CASE("checkpoint columns must fit the model") {
  auto ck = checkpoint();
  ck.feature_columns.pop_back();
  CHECK_THROWS_AS(Classifier(ck, AccountDb{}), ConfigError);
}

TEST_CASE("latency summary and bench") {
  const std::vector<double> xs = {5, 1, 4, 2, 3};
  const auto s = summarize(xs);
  CHECK(s.mean == 3.0);
  CHECK(s.p50 == 3.0);
  CHECK(s.p95 == 5.0);
  CHECK(s.max == 5.0);
  BenchConfig bc;
  bc.graphs = 20;
  const auto r = run_bench(checkpoint(), bc);
  CHECK(r.graphs == 20);
  CHECK(r.mean_edges == 199.0);
  CHECK(r.classify_ms.mean > 0);
  CHECK(r.total_ms.mean >= r.classify_ms.mean);
}
