#pragma once

#include <cstdint>
#include <vector>

#include "revboost/classifier.hpp"

namespace revboost {

struct GbtParams {
  int n_estimators = 100;
  int max_depth = 3;
  double gamma = 0.0;          // minimum split gain
  double learning_rate = 0.1;  // shrinkage applied to every stage
  double lambda = 1.0;         // L2 penalty on leaf weights
  std::uint64_t seed = 0;
};

struct GradHess {
  double g = 0.0;
  double h = 0.0;
};

/// First and second derivative of the logistic loss w.r.t. the raw score.
GradHess logistic_grad_hess(int y, double score);
double logistic_loss(int y, double score);
double sigmoid(double x);

struct RegressionNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int depth = 0;
  double value = 0.0;  // leaf weight -G/(H+lambda)
  double gain = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<RegressionNode> nodes;
  double eval(std::span<const double> x) const;
  int depth() const;
};

class GradientBoostedTrees final : public Classifier {
 public:
  GradientBoostedTrees(std::vector<RegressionTree> stages, double learning_rate, std::size_t dim);

  Prediction predict(std::span<const double> x) const override;
  std::size_t input_dim() const override { return dim_; }
  nlohmann::ordered_json to_json() const override;

  double raw_score(std::span<const double> x) const;
  const std::vector<RegressionTree>& stages() const { return stages_; }
  double learning_rate() const { return learning_rate_; }

  /// Mean training log-loss before any stage (index 0) and after each stage.
  std::vector<double> training_loss;

 private:
  std::vector<RegressionTree> stages_;
  double learning_rate_;
  std::size_t dim_;
};

std::shared_ptr<const GradientBoostedTrees> fit_gbt(const Matrix& X, const Labels& y, const GbtParams& p);

}  // namespace revboost
