#pragma once

#include <span>
#include <string>
#include <vector>

#include "flowguard/gnn/message_graph.hpp"
#include "flowguard/gnn/tensor.hpp"

namespace flowguard::gnn {

inline constexpr double kGatLeakySlope = 0.2;

// ---- single-layer operators ----
// `activate` applies ReLU to the output. Shapes are checked; mismatches
// throw ShapeError. Bias arguments are 1 x d' rows.

// Dense affine map, edge-blind.
Matrix dense_layer(const Matrix& h, const Matrix& w, const Matrix& b, bool activate);

// act(D^-1/2 (A + I) D^-1/2 H W + b). For a directed message graph the
// normalization uses the source out-degree and destination in-degree, each
// counting the self loop; with symmetrized messages both equal the degree.
Matrix gcn_layer(const MessageGraph& g, const Matrix& h, const Matrix& w, const Matrix& b, bool activate);

// act(H W_self + mean_{u -> v} H(u) W_neigh + b); no incoming messages means
// a zero neighbour term.
Matrix sage_layer(const MessageGraph& g, const Matrix& h, const Matrix& w_self, const Matrix& w_neigh,
                  const Matrix& b, bool activate);

// act(mlp((1 + eps) H(v) + sum_{u -> v} H(u))) with mlp = affine, ReLU, affine.
Matrix gin_layer(const MessageGraph& g, const Matrix& h, const Matrix& w1, const Matrix& b1, const Matrix& w2,
                 const Matrix& b2, bool activate, double eps = 0.0);

// Single-head attention over incoming messages plus a self loop:
// e_uv = LeakyReLU(a_src . z_u + a_dst . z_v) with z = H W, alpha = softmax
// of e over the messages into v, output act(sum alpha_uv z_u).
Matrix gat_layer(const MessageGraph& g, const Matrix& h, const Matrix& w, const Matrix& attn_src,
                 const Matrix& attn_dst, bool activate, double leaky_slope = kGatLeakySlope);

// Column-wise mean; throws EmptyGraph for zero rows.
RowVector readout_mean(const Matrix& h);

// ---- layer machinery used by the model ----

enum class LayerKind { dense, gcn, sage, gin, gat };

struct ParamShape {
  std::string name;
  Eigen::Index rows;
  Eigen::Index cols;
  bool is_bias;  // zero-initialised
};

std::vector<ParamShape> layer_param_shapes(LayerKind kind, Eigen::Index in_dim, Eigen::Index out_dim);

// Intermediates kept for the backward pass.
struct LayerCache {
  Matrix input;
  Matrix aggregated;      // gcn: P H; sage: neighbour mean; gin: (1+eps)H + sum
  Matrix inner_pre;       // gin: pre-activation of the inner perceptron
  Matrix projected;       // gat: H W
  std::vector<double> attn_pre;  // gat: per incoming slot, before LeakyReLU
  std::vector<double> attn;      // gat: softmax weights, slot order = CSR then self
  Matrix pre_activation;
  bool activated = false;
};

Matrix layer_forward(LayerKind kind, const MessageGraph& g, const Matrix& h, std::span<const Matrix> params,
                     bool activate, LayerCache* cache);

// Accumulates parameter gradients into `grads` (same layout as params) and
// returns the gradient with respect to the layer input.
Matrix layer_backward(LayerKind kind, const MessageGraph& g, const LayerCache& cache, const Matrix& d_out,
                      std::span<const Matrix> params, std::span<Matrix> grads);

}  // namespace flowguard::gnn
