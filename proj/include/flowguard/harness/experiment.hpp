#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowguard/gnn/checkpoint.hpp"
#include "flowguard/gnn/model.hpp"
#include "flowguard/gnn/train.hpp"
#include "flowguard/harness/dataset.hpp"
#include "flowguard/harness/metrics.hpp"

namespace flowguard::harness {

struct RunResult {
  Metrics metrics;
  gnn::Checkpoint checkpoint;
  std::vector<double> epoch_loss;
  Split split;
  std::vector<double> test_scores;  // parallel to split.test
  std::vector<int> test_predictions;
};

// Split with train_config.seed and train_config.train_size_per_class, drop
// the masked feature columns, train from train_config.seed, then evaluate on
// the held-out remainder. model_config.input_dim is overridden by the mask.
RunResult run_experiment(const Dataset& data, const AblationMask& mask, gnn::ModelConfig model_config,
                         const gnn::TrainConfig& train_config);

Metrics ablation_run(const Dataset& data, const AblationMask& mask, const gnn::ModelConfig& model_config,
                     const gnn::TrainConfig& train_config);

// Scores every graph with a trained checkpoint, applying its feature columns.
struct Evaluation {
  Metrics metrics;
  std::vector<double> scores;
  std::vector<int> predictions;
};
Evaluation evaluate_checkpoint(const gnn::Checkpoint& ckpt, const Dataset& data);

struct SweepCell {
  int epochs = 0;
  int train_size = 0;
  Metrics metrics;
};

// One train/evaluate cycle per (epochs, train size) cell, row-major by epoch.
// Every cell uses train_config's seed, so cells differ only in the swept
// values. Throws ConfigError naming the first infeasible cell before any
// training starts.
std::vector<SweepCell> sweep(const Dataset& data, const std::vector<int>& epochs_grid,
                             const std::vector<int>& train_size_grid, const gnn::ModelConfig& model_config,
                             const gnn::TrainConfig& train_config, const AblationMask& mask = {});

// "epoch,train_size,accuracy,tpr,fpr,auc"
std::string sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace flowguard::harness
