#pragma once

#include <cstddef>
#include <span>

namespace revboost {

/// Counts with fake (label 1) as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct Scores {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Set when precision, recall or F1 had a zero denominator and was reported as 0.
  bool degenerate = false;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred);
Scores scores(const ConfusionMatrix& cm);
double error_rate(std::span<const int> y_true, std::span<const int> y_pred);

}  // namespace revboost
