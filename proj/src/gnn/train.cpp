#include "flowguard/gnn/train.hpp"

#include <cmath>
#include <numeric>

#include "flowguard/errors.hpp"
#include "flowguard/rng.hpp"

namespace flowguard::gnn {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (train_size_per_class < 1) throw ConfigError("train size per class must be at least 1");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
  if (batch_size < 0) throw ConfigError("batch size must be non-negative");
}

Adam::Adam(const TrainConfig& c, const std::vector<NamedTensor>& like)
    : lr_(c.learning_rate), beta1_(c.adam_beta1), beta2_(c.adam_beta2), eps_(c.adam_eps) {
  for (const auto& t : like) {
    m_.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
    v_.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
  }
}

void Adam::step(std::vector<NamedTensor>& params, const std::vector<Matrix>& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseAbs2();
    const auto m_hat = (m_[i] / c1).array();
    const auto v_hat = (v_[i] / c2).array();
    params[i].value.array() -= lr_ * m_hat / (v_hat.sqrt() + eps_);
  }
}

TrainResult train_from(ModelParams start, std::span<const PreparedGraph> graphs, const TrainConfig& config) {
  config.validate();
  bool has_pos = false, has_neg = false;
  for (const auto& g : graphs) (g.label == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw DegenerateDataset("training set must contain both classes");

  TrainResult result{std::move(start), {}};
  Adam adam(config, result.params.tensors);
  SplitMix64 order_rng(derive_seed(config.seed, 0x6f72646572ull));  // "order"

  std::vector<std::size_t> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = config.batch_size == 0 ? graphs.size() : static_cast<std::size_t>(config.batch_size);
  std::vector<PreparedGraph> chunk;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start_at = 0; start_at < order.size(); start_at += batch) {
      const std::size_t end = std::min(order.size(), start_at + batch);
      chunk.clear();
      for (std::size_t i = start_at; i < end; ++i) chunk.push_back(graphs[order[i]]);
      auto lg = gradients(result.params, chunk);
      if (!std::isfinite(lg.loss)) throw NumericalDivergence(epoch, "training loss is not finite");
      epoch_loss += lg.loss * static_cast<double>(chunk.size());
      adam.step(result.params.tensors, lg.grads);
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(graphs.size()));
  }
  return result;
}

TrainResult train_prepared(std::span<const PreparedGraph> graphs, const ModelConfig& model_config,
                           const TrainConfig& train_config) {
  train_config.validate();
  return train_from(ModelParams::init(model_config, train_config.seed), graphs, train_config);
}

TrainResult train(std::span<const CashFlowGraph> graphs, const ModelConfig& model_config,
                  const TrainConfig& train_config) {
  std::vector<PreparedGraph> prepared;
  prepared.reserve(graphs.size());
  for (const auto& g : graphs) {
    if (!g.label) throw InputError("training graph without a label");
    prepared.push_back(prepare(g, model_config));
  }
  return train_prepared(prepared, model_config, train_config);
}

}  // namespace flowguard::gnn
