#include <catch2/catch_amalgamated.hpp>

#include "flowguard/errors.hpp"
#include "flowguard/features.hpp"
#include "flowguard/gnn/model.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace flowguard;
using namespace flowguard::gnn;
using namespace flowguard::testing;

TEST_CASE("architecture names") {
  CHECK(arch_from_string("GraphSAGE") == Arch::GraphSage);
  CHECK(arch_from_string("sage") == Arch::GraphSage);
  CHECK(arch_from_string("gat") == Arch::GAT);
  CHECK_THROWS_AS(arch_from_string("transformer"), ConfigError);
  for (Arch a : kAllArchs) CHECK(arch_from_string(to_string(a)) == a);
}

TEST_CASE("parameter layout and deterministic init") {
  ModelConfig cfg;
  cfg.arch = Arch::GIN;
  const auto p = ModelParams::init(cfg, 9);
  std::vector<std::string> names;
  for (const auto& t : p.tensors) names.push_back(t.name);
  CHECK(names == std::vector<std::string>{"layer0.W1", "layer0.b1", "layer0.W2", "layer0.b2", "layer1.W1", "layer1.b1",
                                          "layer1.W2", "layer1.b2", "head.W", "head.b"});
  CHECK(p.tensors[0].value.rows() == 8);
  CHECK(p.tensors[0].value.cols() == 16);
  CHECK(p.tensors[1].value.isZero(0.0));
  CHECK(ModelParams::init(cfg, 9) == p);
  CHECK_FALSE(ModelParams::init(cfg, 10) == p);
  const double limit = std::sqrt(6.0 / (8 + 16));
  CHECK(p.tensors[0].value.cwiseAbs().maxCoeff() <= limit);

  cfg.arch = Arch::GAT;
  const auto g = ModelParams::init(cfg, 1);
  CHECK(g.tensors[1].name == "layer0.attn_src");
  CHECK(g.tensors[1].value.rows() == 1);
  CHECK(g.tensors[1].value.cols() == 16);
  cfg.num_layers = 0;
  CHECK_THROWS_AS(ModelParams::init(cfg, 1), ConfigError);
}

TEST_CASE("prediction rule") {
  RowVector tie(2);
  tie << 0.3, 0.3;
  auto p = prediction_from_logits(tie);
  CHECK(p.score == 0.5);
  CHECK(p.label == 0);
  RowVector pos(2);
  pos << 0.0, 2.0;
  p = prediction_from_logits(pos);
  CHECK(p.label == 1);
  CHECK(p.score == Catch::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));
}

TEST_CASE("prepare checks features") {
  const auto transfers = worked_example_transfers();
  const auto bare = construct_graph(transfers);
  const auto params = ModelParams::init(ModelConfig{}, 1);
  CHECK_THROWS_AS(infer(bare, params), FeatureMissing);
  auto g = assemble_features(bare, AccountDb{});
  g.features = FeatureMatrix(g.features->leftCols(5));
  CHECK_THROWS_AS(infer(g, params), ShapeError);
}

TEST_CASE("inference is invariant under node relabelling") {
  SplitMix64 rng(31);
  for (Arch arch : kAllArchs) {
    ModelConfig cfg;
    cfg.arch = arch;
    const auto params = ModelParams::init(cfg, 5);
    for (int trial = 0; trial < 20; ++trial) {
      const auto g0 = construct_graph(random_transfers(rng, 8, 14, 3));
      const auto g = assemble_features(g0, random_accounts(rng, g0));
      const auto a = model_forward(g, params);
      const auto b = model_forward(permute_graph(g, rng), params);
      CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("MLP ignores edges while graph models do not") {
  const auto g = assemble_features(construct_graph(worked_example_transfers()), AccountDb{});
  auto rewired = g;
  std::swap(rewired.edges[0].receiver, rewired.edges[1].receiver);
  ModelConfig cfg;
  cfg.arch = Arch::MLP;
  auto p = ModelParams::init(cfg, 2);
  CHECK(model_forward(g, p) == model_forward(rewired, p));
  cfg.arch = Arch::GraphSage;
  p = ModelParams::init(cfg, 2);
  CHECK_FALSE(model_forward(g, p) == model_forward(rewired, p));
}
