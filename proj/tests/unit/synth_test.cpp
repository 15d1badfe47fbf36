#include <catch2/catch_amalgamated.hpp>

#include "flowguard/errors.hpp"
#include "flowguard/features.hpp"
#include "flowguard/harness/synth.hpp"

using namespace flowguard;
using namespace flowguard::harness;

namespace {

Dataset family(SynthFamily f, std::uint64_t seed = 7) {
  SynthConfig c;
  c.family = f;
  c.positives = 60;
  c.negatives = 60;
  c.seed = seed;
  return synth_dataset(c);
}

double col_max(const CashFlowGraph& g, int c) { return g.features->col(c).maxCoeff(); }

}  // namespace

TEST_CASE("synthetic datasets are deterministic per seed") {
  for (auto f : {SynthFamily::profit_cycle, SynthFamily::frequency_burst, SynthFamily::diversity_spread,
                 SynthFamily::structure_only}) {
    const auto a = family(f), b = family(f);
    REQUIRE(a.size() == 120);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].graph == b[i].graph);
      CHECK(graph_to_json(a[i].graph) == graph_to_json(b[i].graph));
    }
    CHECK_FALSE(graph_to_json(family(f, 8)[0].graph) == graph_to_json(a[0].graph));
  }
}

TEST_CASE("labels, node counts and features") {
  const auto d = family(SynthFamily::profit_cycle);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d[i].label() == (i < 60 ? 1 : 0));
    CHECK(d[i].graph.num_nodes() >= 4);
    CHECK(d[i].graph.num_nodes() <= 8);
    REQUIRE(d[i].graph.features);
    CHECK(d[i].graph.features->cols() == 8);
  }
}

TEST_CASE("profit cycle plants a near-maximal gain in positives only") {
  for (const auto& lg : family(SynthFamily::profit_cycle)) {
    CHECK(graph_stats(lg.graph).asset_count == 1);
    if (lg.label() == 1) {
      CHECK(col_max(lg.graph, feature_col::kProfit) > 0.8);
    } else {
      CHECK(lg.graph.features->col(feature_col::kProfit).cwiseAbs().maxCoeff() <= 0.25 + 1e-12);
    }
  }
}

TEST_CASE("frequency burst changes counts but not profits") {
  for (const auto& lg : family(SynthFamily::frequency_burst)) {
    const auto& g = lg.graph;
    if (lg.label() == 1)
      CHECK(g.num_edges() >= g.num_nodes() + 4);
    else
      CHECK(g.num_edges() == g.num_nodes());
    CHECK(graph_stats(g).asset_count == 1);
  }
}

TEST_CASE("diversity spread varies only the asset count") {
  for (const auto& lg : family(SynthFamily::diversity_spread)) {
    const auto stats = graph_stats(lg.graph);
    if (lg.label() == 1)
      CHECK(stats.asset_count >= 3);
    else
      CHECK(stats.asset_count == 1);
  }
}

TEST_CASE("structure only keeps rows identical up to node type") {
  for (const auto& lg : family(SynthFamily::structure_only)) {
    const auto& g = lg.graph;
    const auto& x = *g.features;
    // Loop order is first appearance, so node i is adjacent to i+1 mod n.
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    int opaque = 0, adjacent = 0;
    for (Eigen::Index v = 0; v < n; ++v) {
      CHECK(x.row(v).segment(3, 5) == Eigen::RowVectorXd{{1.0, 1.0, 1.0, 1.0, 0.0}});
      CHECK(x(v, feature_col::kTypeTransparent) == 0.0);
      opaque += x(v, feature_col::kTypeOpaque) == 1.0;
      adjacent += x(v, feature_col::kTypeOpaque) == 1.0 && x((v + 1) % n, feature_col::kTypeOpaque) == 1.0;
    }
    CHECK(opaque >= 2);
    CHECK(opaque <= n / 2);
    if (lg.label() == 1)
      CHECK(adjacent == opaque - 1);
    else
      CHECK(adjacent == 0);
  }
}

TEST_CASE("invalid synthetic configs") {
  SynthConfig c;
  c.positives = 0;
  CHECK_THROWS_AS(synth_dataset(c), ConfigError);
  c = {};
  c.min_nodes = 9;
  CHECK_THROWS_AS(synth_dataset(c), ConfigError);
  c = {};
  c.family = SynthFamily::structure_only;
  c.min_nodes = 3;
  CHECK_THROWS_AS(synth_dataset(c), ConfigError);
  CHECK_THROWS_AS(synth_family_from_string("noise"), ConfigError);
  CHECK(synth_family_from_string("structure_only") == SynthFamily::structure_only);
}

TEST_CASE("random transactions touch exactly the requested accounts") {
  SplitMix64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto r = random_transaction(rng, 100, 100);
    const auto g = construct_graph(extract_transfers(r.tx));
    CHECK(g.num_nodes() == 100);
    CHECK(g.num_edges() == 199);
  }
}
