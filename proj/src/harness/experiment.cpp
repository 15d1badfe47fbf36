#include "flowguard/harness/experiment.hpp"

#include <fmt/format.h>

#include "flowguard/errors.hpp"

namespace flowguard::harness {

namespace {

std::vector<gnn::PreparedGraph> prepare_subset(const Dataset& data, const std::vector<std::size_t>& idx,
                                               const std::vector<int>& columns, const gnn::ModelConfig& config) {
  std::vector<gnn::PreparedGraph> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(gnn::prepare(select_columns(data[i].graph, columns), config));
  return out;
}

std::size_t class_size(const Dataset& data, int cls) {
  std::size_t n = 0;
  for (const auto& g : data) n += g.label() == cls;
  return n;
}

}  // namespace

RunResult run_experiment(const Dataset& data, const AblationMask& mask, gnn::ModelConfig model_config,
                         const gnn::TrainConfig& train_config) {
  mask.validate();
  train_config.validate();
  const auto columns = mask.columns();
  model_config.input_dim = static_cast<int>(columns.size());
  model_config.validate();

  RunResult r;
  r.split = split_dataset(data, train_config.train_size_per_class, train_config.seed);
  const auto train_set = prepare_subset(data, r.split.train, columns, model_config);
  const auto test_set = prepare_subset(data, r.split.test, columns, model_config);

  auto trained = gnn::train_prepared(train_set, model_config, train_config);
  r.epoch_loss = std::move(trained.epoch_loss);
  r.checkpoint = {std::move(trained.params), columns};

  std::vector<int> labels;
  for (const auto& g : test_set) {
    const auto p = gnn::infer(g, r.checkpoint.params);
    r.test_scores.push_back(p.score);
    r.test_predictions.push_back(p.label);
    labels.push_back(g.label);
  }
  r.metrics = evaluate_predictions(r.test_predictions, r.test_scores, labels);
  return r;
}

Metrics ablation_run(const Dataset& data, const AblationMask& mask, const gnn::ModelConfig& model_config,
                     const gnn::TrainConfig& train_config) {
  return run_experiment(data, mask, model_config, train_config).metrics;
}

Evaluation evaluate_checkpoint(const gnn::Checkpoint& ckpt, const Dataset& data) {
  Evaluation e;
  std::vector<int> labels;
  for (const auto& lg : data) {
    const auto p = gnn::infer(select_columns(lg.graph, ckpt.feature_columns), ckpt.params);
    e.scores.push_back(p.score);
    e.predictions.push_back(p.label);
    labels.push_back(lg.label());
  }
  e.metrics = evaluate_predictions(e.predictions, e.scores, labels);
  return e;
}

std::vector<SweepCell> sweep(const Dataset& data, const std::vector<int>& epochs_grid,
                             const std::vector<int>& train_size_grid, const gnn::ModelConfig& model_config,
                             const gnn::TrainConfig& train_config, const AblationMask& mask) {
  if (epochs_grid.empty() || train_size_grid.empty()) throw ConfigError("sweep grids must be nonempty");
  const auto smallest = std::min(class_size(data, 0), class_size(data, 1));
  for (int e : epochs_grid)
    for (int t : train_size_grid) {
      if (e < 1) throw ConfigError(fmt::format("cell (epoch={}, train_size={}): epochs must be at least 1", e, t));
      if (t < 1 || static_cast<std::size_t>(t) >= smallest)
        throw ConfigError(fmt::format("cell (epoch={}, train_size={}): smallest class has {} graphs", e, t,
                                      smallest));
    }

  std::vector<SweepCell> cells;
  for (int e : epochs_grid)
    for (int t : train_size_grid) {
      auto cfg = train_config;
      cfg.epochs = e;
      cfg.train_size_per_class = t;
      cells.push_back({e, t, ablation_run(data, mask, model_config, cfg)});
    }
  return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::string out = "epoch,train_size,accuracy,tpr,fpr,auc\n";
  for (const auto& c : cells)
    out += fmt::format("{},{},{:.6f},{},{},{}\n", c.epochs, c.train_size, c.metrics.accuracy,
                       format_optional(c.metrics.tpr), format_optional(c.metrics.fpr),
                       format_optional(c.metrics.auc));
  return out;
}

}  // namespace flowguard::harness
