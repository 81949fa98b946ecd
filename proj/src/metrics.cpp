#include "revboost/metrics.hpp"

#include <stdexcept>
#include <string>

namespace revboost {

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("confusion: length mismatch (" + std::to_string(y_true.size()) + " vs " +
                                std::to_string(y_pred.size()) + ")");
  if (y_true.empty()) throw std::invalid_argument("confusion: no samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool actual = y_true[i] == 1, predicted = y_pred[i] == 1;
    if (actual && predicted) ++cm.tp;
    else if (!actual && predicted) ++cm.fp;
    else if (actual) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

Scores scores(const ConfusionMatrix& cm) {
  Scores s;
  const auto total = cm.total();
  if (total == 0) throw std::invalid_argument("scores: empty confusion matrix");
  s.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
  if (cm.tp + cm.fp > 0) s.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  else s.degenerate = true;
  if (cm.tp + cm.fn > 0) s.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  else s.degenerate = true;
  if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  else s.degenerate = true;
  return s;
}

double error_rate(std::span<const int> y_true, std::span<const int> y_pred) {
  const auto cm = confusion(y_true, y_pred);
  return static_cast<double>(cm.fp + cm.fn) / static_cast<double>(cm.total());
}

}  // namespace revboost
