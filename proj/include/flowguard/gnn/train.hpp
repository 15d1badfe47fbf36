#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flowguard/cashflow.hpp"
#include "flowguard/gnn/model.hpp"

namespace flowguard::gnn {

struct TrainConfig {
  int epochs = 100;
  int train_size_per_class = 100;
  double learning_rate = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Graphs per optimizer step; 0 means one full-batch step per epoch.
  int batch_size = 0;
  std::uint64_t seed = 42;

  void validate() const;  // throws ConfigError
};

class Adam {
 public:
  Adam(const TrainConfig& config, const std::vector<NamedTensor>& like);
  void step(std::vector<NamedTensor>& params, const std::vector<Matrix>& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // mean training cross-entropy per epoch
};

// Initializes from config.seed and minimizes mean cross-entropy with Adam.
// Every epoch visits the training set in a seeded shuffled order.
// Throws DegenerateDataset when a class is missing and NumericalDivergence
// on a non-finite loss.
TrainResult train(std::span<const CashFlowGraph> graphs, const ModelConfig& model_config,
                  const TrainConfig& train_config);
TrainResult train_prepared(std::span<const PreparedGraph> graphs, const ModelConfig& model_config,
                           const TrainConfig& train_config);
// Continues from existing parameters.
TrainResult train_from(ModelParams start, std::span<const PreparedGraph> graphs, const TrainConfig& train_config);

}  // namespace flowguard::gnn
