#include "revboost/tree.hpp"

#include <algorithm>
#include <cmath>

#include "revboost/rng.hpp"

namespace revboost {

std::string to_string(Splitter s) { return s == Splitter::best ? "best" : "random"; }
std::string to_string(Criterion c) { return c == Criterion::gini ? "gini" : "entropy"; }

Splitter parse_splitter(std::string_view s) {
  if (s == "best") return Splitter::best;
  if (s == "random") return Splitter::random;
  throw UsageError("unknown splitter '" + std::string(s) + "'");
}

Criterion parse_criterion(std::string_view s) {
  if (s == "gini") return Criterion::gini;
  if (s == "entropy") return Criterion::entropy;
  throw UsageError("unknown criterion '" + std::string(s) + "'");
}

double impurity(double w0, double w1, Criterion c) {
  const double total = w0 + w1;
  if (total <= 0.0) throw std::invalid_argument("impurity of an empty node");
  const double p0 = w0 / total, p1 = w1 / total;
  if (c == Criterion::gini) return 1.0 - p0 * p0 - p1 * p1;
  double h = 0.0;
  if (p0 > 0.0) h -= p0 * std::log2(p0);
  if (p1 > 0.0) h -= p1 * std::log2(p1);
  return h;
}

double impurity(std::span<const int> labels, Criterion c) {
  if (labels.empty()) throw std::invalid_argument("impurity of an empty label multiset");
  double counts[2] = {0.0, 0.0};
  for (int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("impurity: labels must be 0 or 1");
    counts[l] += 1.0;
  }
  return impurity(counts[0], counts[1], c);
}

namespace {

// Splits must improve weighted impurity by more than this fraction of the
// node weight; anything smaller is rounding noise.
constexpr double kMinRelativeGain = 1e-12;

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const Labels& y, const Weights& w, const TreeParams& p)
      : X_(X), y_(y), w_(w), p_(p), rng_(derive_seed(p.seed, "tree")), dim_(static_cast<std::size_t>(X.cols())) {}

  std::vector<TreeNode> build(std::vector<std::size_t> idx) {
    grow(idx, 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t>& idx, int depth) {
    TreeNode node;
    node.depth = depth;
    for (auto i : idx) node.weight[y_[i]] += w_[i];
    const double total = node.weight[0] + node.weight[1];
    node.label = node.weight[1] > node.weight[0] ? 1 : 0;
    node.probability = node.weight[1] / total;

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (depth >= p_.max_depth || node.weight[0] == 0.0 || node.weight[1] == 0.0 || idx.size() < 2) return id;

    const double parent = total * impurity(node.weight[0], node.weight[1], p_.criterion);
    SplitCandidate best;
    best.gain = kMinRelativeGain * total;
    for (auto f : candidate_features()) {
      if (p_.splitter == Splitter::best)
        scan_best(idx, f, parent, best);
      else
        try_random(idx, f, parent, best);
    }
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto i : idx) (X_(static_cast<Eigen::Index>(i), best.feature) <= best.threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& n = nodes_[static_cast<std::size_t>(id)];
    n.feature = best.feature;
    n.threshold = best.threshold;
    n.gain = best.gain;
    n.left = l;
    n.right = r;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    if (p_.max_features == 0 || p_.max_features >= dim_) {
      std::vector<std::size_t> all(dim_);
      for (std::size_t f = 0; f < dim_; ++f) all[f] = f;
      return all;
    }
    return sample_without_replacement(dim_, p_.max_features, rng_);
  }

  double split_gain(double parent, const double left[2], const double right[2]) const {
    const double wl = left[0] + left[1], wr = right[0] + right[1];
    if (wl <= 0.0 || wr <= 0.0) return -1.0;
    return parent - wl * impurity(left[0], left[1], p_.criterion) - wr * impurity(right[0], right[1], p_.criterion);
  }

  void scan_best(const std::vector<std::size_t>& idx, std::size_t f, double parent, SplitCandidate& best) {
    order_.clear();
    for (auto i : idx) order_.emplace_back(X_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)), i);
    std::sort(order_.begin(), order_.end());
    double left[2] = {0.0, 0.0}, right[2] = {0.0, 0.0};
    for (const auto& [v, i] : order_) right[y_[i]] += w_[i];
    for (std::size_t k = 0; k + 1 < order_.size(); ++k) {
      const auto i = order_[k].second;
      left[y_[i]] += w_[i];
      right[y_[i]] -= w_[i];
      const double lo = order_[k].first, hi = order_[k + 1].first;
      if (!(lo < hi)) continue;
      double t = lo + (hi - lo) / 2.0;
      if (t >= hi) t = lo;
      const double g = split_gain(parent, left, right);
      if (g > best.gain) best = {static_cast<int>(f), t, g};
    }
  }

  void try_random(const std::vector<std::size_t>& idx, std::size_t f, double parent, SplitCandidate& best) {
    const auto col = static_cast<Eigen::Index>(f);
    double lo = X_(static_cast<Eigen::Index>(idx[0]), col), hi = lo;
    for (auto i : idx) {
      lo = std::min(lo, X_(static_cast<Eigen::Index>(i), col));
      hi = std::max(hi, X_(static_cast<Eigen::Index>(i), col));
    }
    if (!(lo < hi)) return;
    const double t = uniform_real(rng_, lo, hi);
    double left[2] = {0.0, 0.0}, right[2] = {0.0, 0.0};
    for (auto i : idx) (X_(static_cast<Eigen::Index>(i), col) <= t ? left : right)[y_[i]] += w_[i];
    const double g = split_gain(parent, left, right);
    if (g > best.gain) best = {static_cast<int>(f), t, g};
  }

  const Matrix& X_;
  const Labels& y_;
  const Weights& w_;
  const TreeParams& p_;
  Rng rng_;
  std::size_t dim_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, std::size_t>> order_;
};

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t dim, TreeParams params)
    : nodes_(std::move(nodes)), dim_(dim), params_(params) {
  if (nodes_.empty()) throw std::invalid_argument("DecisionTree: no nodes");
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  check_input_dim(dim_, x.size());
  const TreeNode* n = &nodes_[0];
  while (!n->is_leaf()) n = &nodes_[static_cast<std::size_t>(x[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right)];
  return *n;
}

Prediction DecisionTree::predict(std::span<const double> x) const {
  const auto& leaf = leaf_for(x);
  return {leaf.label, leaf.probability};
}

int DecisionTree::depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

nlohmann::ordered_json DecisionTree::to_json() const {
  nlohmann::ordered_json j;
  j["type"] = "tree";
  j["input_dim"] = dim_;
  j["max_depth"] = params_.max_depth;
  j["splitter"] = to_string(params_.splitter);
  j["criterion"] = to_string(params_.criterion);
  auto& arr = j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : nodes_) {
    nlohmann::ordered_json o;
    if (n.is_leaf()) {
      o["leaf"] = true;
    } else {
      o["feature"] = n.feature;
      o["threshold"] = n.threshold;
      o["left"] = n.left;
      o["right"] = n.right;
      o["gain"] = n.gain;
    }
    o["depth"] = n.depth;
    o["counts"] = {n.weight[0], n.weight[1]};
    o["label"] = n.label;
    o["probability"] = n.probability;
    arr.push_back(std::move(o));
  }
  return j;
}

std::shared_ptr<const DecisionTree> fit_tree(const Matrix& X, const Labels& y, const Weights& w, const TreeParams& p) {
  if (!w.empty()) check_training_input(X, y, &w);
  else check_training_input(X, y);
  if (p.max_depth < 0) throw UsageError("max_depth must be >= 0");
  const Weights unit = w.empty() ? Weights(y.size(), 1.0) : Weights{};
  const Weights& weights = w.empty() ? unit : w;

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (weights[i] > 0.0) idx.push_back(i);

  TreeBuilder builder(X, y, weights, p);
  return std::make_shared<const DecisionTree>(builder.build(std::move(idx)), static_cast<std::size_t>(X.cols()), p);
}

}  // namespace revboost
