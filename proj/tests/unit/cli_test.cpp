#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>

#include <json.hpp>

#include "flowguard/cashflow.hpp"
#include "helpers.hpp"

using namespace flowguard;
using namespace flowguard::testing;

namespace {

struct Run {
  int code;
  std::string output;  // stdout and stderr interleaved
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(FLOWGUARD_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string out;
  char buf[4096];
  while (auto n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("usage errors exit 2") {
  auto r = run("classify --fixture x --model y --no-such-flag");
  CHECK(r.code == 2);
  CHECK(r.output.find("Usage") != std::string::npos);
  CHECK(run("").code == 2);
  CHECK(run("train --data d --out m --arch transformer").code == 2);
  CHECK(run("--help").code == 0);
  CHECK(run("--help").output.find("FLOWGUARD_") != std::string::npos);
}

TEST_CASE("parse, build and featurize chain") {
  TempDir dir("cli-chain");
  auto r = run("parse --fixture " + q(data_path("worked_example.json")));
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.output).at("transfers").size() == 7);
  REQUIRE(run("build --fixture " + q(data_path("worked_example.json")) + " --out " + q(dir.path / "g.json")).code == 0);
  REQUIRE(run("featurize --graph " + q(dir.path / "g.json") + " --accounts " + q(data_path("worked_example_accounts.json")) +
              " --out " + q(dir.path / "f.json"))
              .code == 0);
  const auto g = graph_from_json(read_text(dir.path / "f.json"));
  REQUIRE(g.features);
  CHECK((*g.features)(0, 7) == Catch::Approx(1.0 / 11));
}

TEST_CASE("operational failures exit 1 with the phase") {
  TempDir dir("cli-fail");
  std::ofstream(dir.path / "bad.json") << "{\"tx_hash\": ";
  auto r = run("parse --fixture " + q(dir.path / "bad.json"));
  CHECK(r.code == 1);
  CHECK(r.output.find("[parse]") != std::string::npos);
  CHECK(r.output.find("ParseError") != std::string::npos);
  r = run("eval --model " + q(dir.path / "missing.ckpt") + " --data " + q(dir.path));
  CHECK(r.code == 1);
  CHECK(r.output.find("[load]") != std::string::npos);
}

TEST_CASE("synth, train twice, eval and classify") {
  TempDir dir("cli-train");
  const auto data = dir.path / "data";
  REQUIRE(run("synth --family profit_cycle --positives 30 --negatives 30 --out " + q(data)).code == 0);
  const std::string train = "train --data " + q(data) + " --epochs 20 --train-size 10 --arch graphsage --seed 42";
  REQUIRE(run(train + " --out " + q(dir.path / "a.ckpt") + " --loss-csv " + q(dir.path / "loss.csv")).code == 0);
  REQUIRE(run(train + " --out " + q(dir.path / "b.ckpt")).code == 0);
  CHECK(read_text(dir.path / "a.ckpt") == read_text(dir.path / "b.ckpt"));
  const auto loss = read_text(dir.path / "loss.csv");
  CHECK(loss.rfind("epoch,loss\n1,", 0) == 0);
  CHECK(std::count(loss.begin(), loss.end(), '\n') == 21);

  // Environment fallback for an option not given on the command line.
  REQUIRE(run("train --data " + q(data) + " --epochs 20 --train-size 10 --arch graphsage --out " +
              q(dir.path / "c.ckpt"),
              "FLOWGUARD_SEED=42")
              .code == 0);
  CHECK(read_text(dir.path / "c.ckpt") == read_text(dir.path / "a.ckpt"));

  auto r = run("eval --model " + q(dir.path / "a.ckpt") + " --data " + q(data));
  REQUIRE(r.code == 0);
  CHECK(r.output.rfind("accuracy,tpr,fpr,auc,tp,fn,fp,tn\n", 0) == 0);

  r = run("classify --fixture " + q(data_path("worked_example.json")) + " --model " + q(dir.path / "a.ckpt"));
  REQUIRE(r.code == 0);
  CHECK(r.output.find("prediction: ") != std::string::npos);
  CHECK(r.output.find("nodes=5 edges=7 assets=2 max_node_degree=4") != std::string::npos);
  r = run("classify --json --fixture " + q(data_path("no_transfers.json")) + " --model " + q(dir.path / "a.ckpt"));
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.output).at("no_transfers") == true);

  r = run("ablate --data " + q(data) + " --drop profit --epochs 10 --train-size 10");
  REQUIRE(r.code == 0);
  CHECK(r.output.find("without-profit,7,") != std::string::npos);

  r = run("sweep --data " + q(data) + " --epochs-grid 5,10 --train-sizes 5:10:5");
  REQUIRE(r.code == 0);
  CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 5);
  r = run("sweep --data " + q(data) + " --epochs-grid 5 --train-sizes 40");
  CHECK(r.code == 1);
  CHECK(r.output.find("train_size=40") != std::string::npos);
}

TEST_CASE("bench reports percentiles") {
  auto r = run("bench --graphs 20 --nodes 100");
  REQUIRE(r.code == 0);
  CHECK(r.output.find("classify_ms") != std::string::npos);
  CHECK(r.output.find("p95=") != std::string::npos);
}
