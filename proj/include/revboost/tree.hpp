#pragma once

#include <cstdint>
#include <vector>

#include "revboost/classifier.hpp"

namespace revboost {

enum class Splitter { best, random };
enum class Criterion { gini, entropy };

std::string to_string(Splitter s);
std::string to_string(Criterion c);
Splitter parse_splitter(std::string_view s);
Criterion parse_criterion(std::string_view s);

struct TreeParams {
  int max_depth = 3;
  Splitter splitter = Splitter::best;
  Criterion criterion = Criterion::gini;
  std::uint64_t seed = 0;
  /// Candidate features drawn per node; 0 means all features.
  std::size_t max_features = 0;
};

/// Impurity of a weighted two-class node from its class weights.
double impurity(double w0, double w1, Criterion c);
/// Impurity of a label multiset. Throws on an empty multiset.
double impurity(std::span<const int> labels, Criterion c);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int depth = 0;
  double weight[2] = {0.0, 0.0};
  int label = 0;
  double probability = 0.0;  // weighted class-1 fraction
  double gain = 0.0;         // weighted impurity decrease of the split

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree final : public Classifier {
 public:
  DecisionTree(std::vector<TreeNode> nodes, std::size_t dim, TreeParams params);

  Prediction predict(std::span<const double> x) const override;
  std::size_t input_dim() const override { return dim_; }
  nlohmann::ordered_json to_json() const override;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeParams& params() const { return params_; }
  int depth() const;
  /// Node reached by x.
  const TreeNode& leaf_for(std::span<const double> x) const;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t dim_;
  TreeParams params_;
};

/// Greedy CART fit maximising weighted impurity decrease. Zero-weight samples
/// take no part in fitting. Empty `w` means unit weights.
std::shared_ptr<const DecisionTree> fit_tree(const Matrix& X, const Labels& y, const Weights& w, const TreeParams& p);

}  // namespace revboost
