#pragma once

#include <cstdint>
#include <vector>

#include "revboost/rng.hpp"
#include "revboost/tree.hpp"

namespace revboost {

struct ForestParams {
  int n_estimators = 100;
  int max_depth = 3;
  Criterion criterion = Criterion::gini;
  std::uint64_t seed = 0;
  bool bootstrap = true;  // disabling is a test hook
  unsigned threads = 1;
};

/// Bootstrap-bagged trees with per-node feature subsampling. Prediction is
/// the mean class-1 probability; label 1 iff that mean exceeds 0.5.
class RandomForest final : public Classifier {
 public:
  explicit RandomForest(std::vector<std::shared_ptr<const DecisionTree>> trees);

  Prediction predict(std::span<const double> x) const override;
  std::size_t input_dim() const override;
  nlohmann::ordered_json to_json() const override;

  const std::vector<std::shared_ptr<const DecisionTree>>& trees() const { return trees_; }

 private:
  std::vector<std::shared_ptr<const DecisionTree>> trees_;
};

/// ceil(sqrt(d)).
std::size_t forest_max_features(std::size_t d);
std::uint64_t forest_tree_seed(std::uint64_t seed, std::size_t t);

/// Multiplicity of each sample in one bootstrap resample.
Weights bootstrap_counts(std::size_t n, Rng& rng);

std::shared_ptr<const RandomForest> fit_forest(const Matrix& X, const Labels& y, const ForestParams& p);

}  // namespace revboost
