#include "revboost/forest.hpp"

#include <cmath>

#include "revboost/rng.hpp"

namespace revboost {

std::size_t forest_max_features(std::size_t d) {
  auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(d)));
  while (k * k < d) ++k;
  while (k > 1 && (k - 1) * (k - 1) >= d) --k;
  return std::max<std::size_t>(k, 1);
}

std::uint64_t forest_tree_seed(std::uint64_t seed, std::size_t t) { return derive_seed(seed, "forest-tree", t); }

Weights bootstrap_counts(std::size_t n, Rng& rng) {
  Weights counts(n, 0.0);
  for (auto i : bootstrap_indices(n, rng)) counts[i] += 1.0;
  return counts;
}

RandomForest::RandomForest(std::vector<std::shared_ptr<const DecisionTree>> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) throw std::invalid_argument("RandomForest: no trees");
}

std::size_t RandomForest::input_dim() const { return trees_.front()->input_dim(); }

Prediction RandomForest::predict(std::span<const double> x) const {
  check_input_dim(input_dim(), x.size());
  double sum = 0.0;
  for (const auto& t : trees_) sum += t->predict(x).score;
  const double p = sum / static_cast<double>(trees_.size());
  return {p > 0.5 ? 1 : 0, p};
}

nlohmann::ordered_json RandomForest::to_json() const {
  nlohmann::ordered_json j;
  j["type"] = "forest";
  j["input_dim"] = input_dim();
  auto& arr = j["trees"] = nlohmann::ordered_json::array();
  for (const auto& t : trees_) arr.push_back(t->to_json());
  return j;
}

std::shared_ptr<const RandomForest> fit_forest(const Matrix& X, const Labels& y, const ForestParams& p) {
  check_training_input(X, y);
  if (p.n_estimators < 1) throw UsageError("n_estimators must be >= 1");
  const auto n = y.size();
  const auto d = static_cast<std::size_t>(X.cols());

  std::vector<std::shared_ptr<const DecisionTree>> trees(static_cast<std::size_t>(p.n_estimators));
  parallel_for(trees.size(), p.threads, [&](std::size_t t) {
    const auto seed = forest_tree_seed(p.seed, t);
    Rng rng(derive_seed(seed, "bootstrap"));
    const Weights counts = p.bootstrap ? bootstrap_counts(n, rng) : Weights(n, 1.0);
    TreeParams tp{p.max_depth, Splitter::best, p.criterion, seed, forest_max_features(d)};
    trees[t] = fit_tree(X, y, counts, tp);
  });
  return std::make_shared<const RandomForest>(std::move(trees));
}

}  // namespace revboost
