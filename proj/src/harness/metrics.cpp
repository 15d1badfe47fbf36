#include "flowguard/harness/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "flowguard/errors.hpp"

namespace flowguard::harness {

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw InputError(fmt::format("{} predictions for {} labels", predictions.size(), labels.size()));
  if (labels.empty()) throw InputError("cannot compute metrics over zero samples");

  Metrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pos = labels[i] == 1;
    const bool hit = predictions[i] == 1;
    if (pos && hit) ++m.tp;
    else if (pos) ++m.fn;
    else if (hit) ++m.fp;
    else ++m.tn;
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(labels.size());
  if (m.tp + m.fn > 0) m.tpr = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  if (m.fp + m.tn > 0) m.fpr = static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn);
  return m;
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw InputError(fmt::format("{} scores for {} labels", scores.size(), labels.size()));
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const auto negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw UndefinedAUC("AUC needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of positive mid-ranks (1-based); ties share the average rank.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum += mid_rank;
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

Metrics evaluate_predictions(std::span<const int> predictions, std::span<const double> scores,
                             std::span<const int> labels) {
  Metrics m = compute_metrics(predictions, labels);
  if (m.tp + m.fn > 0 && m.fp + m.tn > 0) m.auc = auc_roc(scores, labels);
  return m;
}

std::string metrics_csv_header() { return "accuracy,tpr,fpr,auc,tp,fn,fp,tn"; }

std::string format_optional(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v) : std::string{};
}

std::string metrics_csv_row(const Metrics& m) {
  return fmt::format("{:.6f},{},{},{},{},{},{},{}", m.accuracy, format_optional(m.tpr), format_optional(m.fpr),
                     format_optional(m.auc), m.tp, m.fn, m.fp, m.tn);
}

}  // namespace flowguard::harness
