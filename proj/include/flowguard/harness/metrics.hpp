#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace flowguard::harness {

// Confusion counts with PMA (label 1) as the positive class. A rate whose
// denominator class is empty is absent rather than zero.
struct Metrics {
  double accuracy = 0;
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::optional<double> auc;
  std::size_t tp = 0, fn = 0, fp = 0, tn = 0;

  bool operator==(const Metrics&) const = default;
};

// Throws InputError on length mismatch or empty input.
Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels);

// Mann-Whitney statistic: P(score_pos > score_neg) + 0.5 P(tie), computed
// from mid-ranks. Throws UndefinedAUC when only one class is present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

// Counts plus AUC when both classes are present.
Metrics evaluate_predictions(std::span<const int> predictions, std::span<const double> scores,
                             std::span<const int> labels);

// "accuracy,tpr,fpr,auc,tp,fn,fp,tn"; absent values are empty fields.
std::string metrics_csv_header();
std::string metrics_csv_row(const Metrics& m);
std::string format_optional(const std::optional<double>& v);

}  // namespace flowguard::harness
