#include "flowguard/gnn/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "flowguard/errors.hpp"
#include "flowguard/rng.hpp"

namespace flowguard::gnn {

std::string_view to_string(Arch a) {
  switch (a) {
    case Arch::MLP: return "mlp";
    case Arch::GCN: return "gcn";
    case Arch::GAT: return "gat";
    case Arch::GIN: return "gin";
    case Arch::GraphSage: return "graphsage";
  }
  return "graphsage";
}

Arch arch_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Arch a : kAllArchs)
    if (to_string(a) == lower) return a;
  if (lower == "sage") return Arch::GraphSage;
  throw ConfigError("unknown architecture '" + std::string(s) + "' (mlp, gcn, gat, gin, graphsage)");
}

void ModelConfig::validate() const {
  if (num_layers < 1) throw ConfigError("num_layers must be at least 1");
  if (hidden_dim < 1 || out_dim < 1 || input_dim < 1) throw ConfigError("dimensions must be at least 1");
}

LayerKind layer_kind(Arch arch) {
  switch (arch) {
    case Arch::MLP: return LayerKind::dense;
    case Arch::GCN: return LayerKind::gcn;
    case Arch::GAT: return LayerKind::gat;
    case Arch::GIN: return LayerKind::gin;
    case Arch::GraphSage: return LayerKind::sage;
  }
  return LayerKind::dense;
}

namespace {

struct Layout {
  // [begin, end) into the tensor list for each graph layer; head is last two.
  std::vector<std::pair<std::size_t, std::size_t>> layers;
  std::size_t head = 0;
};

Layout layout_of(const ModelConfig& config) {
  Layout l;
  std::size_t at = 0;
  for (int i = 0; i < config.num_layers; ++i) {
    const auto in = i == 0 ? config.input_dim : config.hidden_dim;
    const auto n = layer_param_shapes(layer_kind(config.arch), in, config.hidden_dim).size();
    l.layers.emplace_back(at, at + n);
    at += n;
  }
  l.head = at;
  return l;
}

std::span<const Matrix> tensor_span(const std::vector<Matrix>& all, std::pair<std::size_t, std::size_t> range) {
  return std::span<const Matrix>(all).subspan(range.first, range.second - range.first);
}

std::vector<Matrix> values_of(const ModelParams& params) {
  std::vector<Matrix> out;
  out.reserve(params.tensors.size());
  for (const auto& t : params.tensors) out.push_back(t.value);
  return out;
}

struct ForwardTrace {
  std::vector<LayerCache> caches;
  RowVector pooled;
  RowVector logits;
};

RowVector forward_impl(const PreparedGraph& g, const ModelConfig& config, const std::vector<Matrix>& w,
                       const Layout& layout, ForwardTrace* trace) {
  const auto kind = layer_kind(config.arch);
  Matrix h = g.features;
  if (trace) trace->caches.resize(layout.layers.size());
  for (std::size_t i = 0; i < layout.layers.size(); ++i) {
    const bool hidden = i + 1 < layout.layers.size();
    h = layer_forward(kind, g.messages, h, tensor_span(w, layout.layers[i]), hidden,
                      trace ? &trace->caches[i] : nullptr);
  }
  RowVector pooled = readout_mean(h);
  RowVector logits = pooled * w[layout.head] + w[layout.head + 1];
  if (trace) {
    trace->pooled = pooled;
    trace->logits = logits;
  }
  return logits;
}

double cross_entropy(const RowVector& logits, int label) {
  const double peak = logits.maxCoeff();
  const double lse = peak + std::log((logits.array() - peak).exp().sum());
  return lse - logits(label);
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  ModelParams p;
  p.config = config;
  p.seed = seed;
  SplitMix64 rng(seed);

  auto add = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols, bool zero, double fan_in,
                 double fan_out) {
    Matrix m(rows, cols);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = zero ? 0.0 : rng.uniform(-limit, limit);
    p.tensors.push_back({name, std::move(m)});
  };

  for (int i = 0; i < config.num_layers; ++i) {
    const auto in = i == 0 ? config.input_dim : config.hidden_dim;
    for (const auto& s : layer_param_shapes(layer_kind(config.arch), in, config.hidden_dim)) {
      // Attention vectors are 1 x d; treat them as d -> 1 maps.
      const bool is_vector = s.rows == 1 && !s.is_bias;
      add("layer" + std::to_string(i) + "." + s.name, s.rows, s.cols, s.is_bias,
          is_vector ? static_cast<double>(s.cols) : static_cast<double>(s.rows),
          is_vector ? 1.0 : static_cast<double>(s.cols));
    }
  }
  add("head.W", config.hidden_dim, config.out_dim, false, config.hidden_dim, config.out_dim);
  add("head.b", 1, config.out_dim, true, 1, 1);
  return p;
}

bool ModelParams::operator==(const ModelParams& other) const {
  if (!(config == other.config) || seed != other.seed || tensors.size() != other.tensors.size()) return false;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& a = tensors[i];
    const auto& b = other.tensors[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols() ||
        a.value != b.value)
      return false;
  }
  return true;
}

PreparedGraph prepare(const CashFlowGraph& g, const ModelConfig& config) {
  if (!g.features) throw FeatureMissing("graph has no feature matrix; run feature extraction first");
  if (g.features->cols() != config.input_dim)
    throw ShapeError("graph features have " + std::to_string(g.features->cols()) + " columns, model expects " +
                     std::to_string(config.input_dim));
  if (static_cast<std::size_t>(g.features->rows()) != g.num_nodes())
    throw ShapeError("feature matrix row count differs from node count");
  PreparedGraph p;
  p.messages = MessageGraph::build(g, config.direction);
  p.features = *g.features;
  p.label = g.label.value_or(0);
  return p;
}

RowVector model_forward(const PreparedGraph& g, const ModelParams& params) {
  const auto layout = layout_of(params.config);
  if (params.tensors.size() != layout.head + 2) throw ShapeError("parameter count does not match model config");
  if (g.features.cols() != params.config.input_dim)
    throw ShapeError("graph features have " + std::to_string(g.features.cols()) + " columns, model expects " +
                     std::to_string(params.config.input_dim));
  return forward_impl(g, params.config, values_of(params), layout, nullptr);
}

RowVector model_forward(const CashFlowGraph& g, const ModelParams& params) {
  return model_forward(prepare(g, params.config), params);
}

Prediction prediction_from_logits(const RowVector& logits) {
  Prediction p;
  // Two-class softmax written as a logistic of the logit gap.
  p.score = logits.size() == 2 ? 1.0 / (1.0 + std::exp(logits(0) - logits(1))) : 0.0;
  p.label = p.score > 0.5 ? 1 : 0;
  return p;
}

Prediction infer(const PreparedGraph& g, const ModelParams& params) {
  return prediction_from_logits(model_forward(g, params));
}

Prediction infer(const CashFlowGraph& g, const ModelParams& params) {
  return prediction_from_logits(model_forward(g, params));
}

double mean_loss(const ModelParams& params, std::span<const PreparedGraph> batch) {
  const auto layout = layout_of(params.config);
  const auto w = values_of(params);
  double total = 0.0;
  for (const auto& g : batch) total += cross_entropy(forward_impl(g, params.config, w, layout, nullptr), g.label);
  return batch.empty() ? 0.0 : total / static_cast<double>(batch.size());
}

LossAndGradients gradients(const ModelParams& params, std::span<const PreparedGraph> batch, double loss_scale) {
  const auto layout = layout_of(params.config);
  if (params.tensors.size() != layout.head + 2) throw ShapeError("parameter count does not match model config");
  const auto w = values_of(params);
  const auto kind = layer_kind(params.config.arch);

  LossAndGradients out;
  out.grads.reserve(w.size());
  for (const auto& m : w) out.grads.push_back(Matrix::Zero(m.rows(), m.cols()));
  if (batch.empty()) return out;

  const double scale = loss_scale / static_cast<double>(batch.size());
  ForwardTrace trace;
  for (const auto& g : batch) {
    if (g.features.cols() != params.config.input_dim) throw ShapeError("graph feature width differs from model input");
    forward_impl(g, params.config, w, layout, &trace);
    out.loss += scale * cross_entropy(trace.logits, g.label);

    // d(CE)/d(logits) = softmax - onehot
    RowVector probs = (trace.logits.array() - trace.logits.maxCoeff()).exp();
    probs /= probs.sum();
    RowVector d_logits = probs;
    d_logits(g.label) -= 1.0;
    d_logits *= scale;

    out.grads[layout.head] += trace.pooled.transpose() * d_logits;
    out.grads[layout.head + 1] += d_logits;
    const RowVector d_pooled = d_logits * w[layout.head].transpose();

    const auto n = static_cast<Eigen::Index>(g.messages.num_nodes);
    Matrix d_h = d_pooled.replicate(n, 1) / static_cast<double>(n);
    for (std::size_t i = layout.layers.size(); i-- > 0;) {
      const auto range = layout.layers[i];
      auto grads = std::span<Matrix>(out.grads).subspan(range.first, range.second - range.first);
      d_h = layer_backward(kind, g.messages, trace.caches[i], d_h, tensor_span(w, range), grads);
    }
  }
  return out;
}

}  // namespace flowguard::gnn
