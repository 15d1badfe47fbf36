#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowguard/cashflow.hpp"
#include "flowguard/gnn/layers.hpp"
#include "flowguard/gnn/message_graph.hpp"
#include "flowguard/gnn/tensor.hpp"

namespace flowguard::gnn {

enum class Arch { MLP, GCN, GAT, GIN, GraphSage };
std::string_view to_string(Arch a);
Arch arch_from_string(std::string_view s);  // case-insensitive; throws ConfigError
inline constexpr Arch kAllArchs[] = {Arch::MLP, Arch::GCN, Arch::GAT, Arch::GIN, Arch::GraphSage};

struct ModelConfig {
  Arch arch = Arch::GraphSage;
  int num_layers = 2;
  int hidden_dim = 16;
  int out_dim = 2;
  Direction direction = Direction::symmetrized;
  int input_dim = 8;

  void validate() const;  // throws ConfigError
  bool operator==(const ModelConfig&) const = default;
};

struct NamedTensor {
  std::string name;
  Matrix value;
};

// Graph layers (input -> hidden -> ... -> hidden, ReLU between), then a
// dense head hidden -> out_dim applied after mean readout.
struct ModelParams {
  ModelConfig config;
  std::uint64_t seed = 0;
  std::vector<NamedTensor> tensors;

  // Glorot-uniform weights drawn from SplitMix64(seed), zero biases.
  static ModelParams init(const ModelConfig& config, std::uint64_t seed);

  bool operator==(const ModelParams& other) const;
};

LayerKind layer_kind(Arch arch);

// One graph ready for the model: message structure plus features.
struct PreparedGraph {
  MessageGraph messages;
  Matrix features;
  int label = 0;
};

// Throws FeatureMissing when the graph has no features and ShapeError when
// their width differs from config.input_dim.
PreparedGraph prepare(const CashFlowGraph& g, const ModelConfig& config);

// Logits (1 x out_dim).
RowVector model_forward(const PreparedGraph& g, const ModelParams& params);
RowVector model_forward(const CashFlowGraph& g, const ModelParams& params);

struct Prediction {
  int label = 0;      // 1 iff score > 0.5
  double score = 0;   // softmax probability of class 1
};

Prediction prediction_from_logits(const RowVector& logits);
Prediction infer(const CashFlowGraph& g, const ModelParams& params);
Prediction infer(const PreparedGraph& g, const ModelParams& params);

struct LossAndGradients {
  double loss = 0;             // mean cross-entropy times loss_scale
  std::vector<Matrix> grads;   // parallel to ModelParams::tensors
};

// Exact reverse-mode gradients of loss_scale * mean cross-entropy over the
// batch. Summation follows batch order.
LossAndGradients gradients(const ModelParams& params, std::span<const PreparedGraph> batch, double loss_scale = 1.0);

// Mean cross-entropy only.
double mean_loss(const ModelParams& params, std::span<const PreparedGraph> batch);

}  // namespace flowguard::gnn
