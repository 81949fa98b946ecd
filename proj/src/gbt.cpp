#include "revboost/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace revboost {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

GradHess logistic_grad_hess(int y, double score) {
  const double p = sigmoid(score);
  return {p - static_cast<double>(y), p * (1.0 - p)};
}

double logistic_loss(int y, double score) {
  // log(1 + e^s) - y s, evaluated without overflow
  const double softplus = score > 0.0 ? score + std::log1p(std::exp(-score)) : std::log1p(std::exp(score));
  return softplus - static_cast<double>(y) * score;
}

double RegressionTree::eval(std::span<const double> x) const {
  const RegressionNode* n = &nodes[0];
  while (!n->is_leaf()) n = &nodes[static_cast<std::size_t>(x[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right)];
  return n->value;
}

int RegressionTree::depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

GradientBoostedTrees::GradientBoostedTrees(std::vector<RegressionTree> stages, double learning_rate, std::size_t dim)
    : stages_(std::move(stages)), learning_rate_(learning_rate), dim_(dim) {}

double GradientBoostedTrees::raw_score(std::span<const double> x) const {
  check_input_dim(dim_, x.size());
  double s = 0.0;
  for (const auto& t : stages_) s += learning_rate_ * t.eval(x);
  return s;
}

Prediction GradientBoostedTrees::predict(std::span<const double> x) const {
  const double p = sigmoid(raw_score(x));
  return {p > 0.5 ? 1 : 0, p};
}

nlohmann::ordered_json GradientBoostedTrees::to_json() const {
  nlohmann::ordered_json j;
  j["type"] = "gbt";
  j["input_dim"] = dim_;
  j["learning_rate"] = learning_rate_;
  auto& arr = j["stages"] = nlohmann::ordered_json::array();
  for (const auto& t : stages_) {
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : t.nodes) {
      if (n.is_leaf())
        nodes.push_back({{"value", n.value}});
      else
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}, {"gain", n.gain}});
    }
    arr.push_back(std::move(nodes));
  }
  return j;
}

namespace {

class StageBuilder {
 public:
  StageBuilder(const Matrix& X, const std::vector<std::vector<std::size_t>>& sorted, const GbtParams& p)
      : X_(X), sorted_(sorted), p_(p), node_of_(static_cast<std::size_t>(X.rows())) {}

  RegressionTree build(const std::vector<double>& g, const std::vector<double>& h) {
    g_ = &g;
    h_ = &h;
    tree_.nodes.clear();
    std::fill(node_of_.begin(), node_of_.end(), 0);
    double G = 0.0, H = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      G += g[i];
      H += h[i];
    }
    grow(0, G, H);
    return std::move(tree_);
  }

  const std::vector<int>& assignment() const { return node_of_; }

 private:
  double score(double G, double H) const { return G * G / (H + p_.lambda); }

  int grow(int depth, double G, double H) {
    const int id = static_cast<int>(tree_.nodes.size());
    RegressionNode node;
    node.depth = depth;
    node.value = H + p_.lambda > 0.0 ? -G / (H + p_.lambda) : 0.0;
    tree_.nodes.push_back(node);
    if (depth >= p_.max_depth) return id;

    int best_feature = -1;
    double best_threshold = 0.0, best_gain = 0.0, best_GL = 0.0, best_HL = 0.0;
    const double parent = H + p_.lambda > 0.0 ? score(G, H) : 0.0;
    const auto& g = *g_;
    const auto& h = *h_;
    for (std::size_t f = 0; f < sorted_.size(); ++f) {
      const auto col = static_cast<Eigen::Index>(f);
      double GL = 0.0, HL = 0.0;
      std::size_t prev = SIZE_MAX;
      for (auto i : sorted_[f]) {
        if (node_of_[i] != id) continue;
        if (prev != SIZE_MAX) {
          const double lo = X_(static_cast<Eigen::Index>(prev), col), hi = X_(static_cast<Eigen::Index>(i), col);
          if (lo < hi && HL + p_.lambda > 0.0 && H - HL + p_.lambda > 0.0) {
            const double gain = 0.5 * (score(GL, HL) + score(G - GL, H - HL) - parent) - p_.gamma;
            if (gain > best_gain) {
              double t = lo + (hi - lo) / 2.0;
              if (t >= hi) t = lo;
              best_feature = static_cast<int>(f);
              best_threshold = t;
              best_gain = gain;
              best_GL = GL;
              best_HL = HL;
            }
          }
        }
        GL += g[i];
        HL += h[i];
        prev = i;
      }
    }
    if (best_feature < 0) return id;

    const int left_id = static_cast<int>(tree_.nodes.size());
    // Children are numbered in creation order: left subtree first, so tag the
    // right samples with a placeholder until the left subtree is done.
    constexpr int kPendingRight = -2;
    const auto col = static_cast<Eigen::Index>(best_feature);
    for (std::size_t i = 0; i < node_of_.size(); ++i)
      if (node_of_[i] == id) node_of_[i] = X_(static_cast<Eigen::Index>(i), col) <= best_threshold ? left_id : kPendingRight - id;
    grow(depth + 1, best_GL, best_HL);
    const int right_id = static_cast<int>(tree_.nodes.size());
    for (auto& a : node_of_)
      if (a == kPendingRight - id) a = right_id;
    grow(depth + 1, G - best_GL, H - best_HL);

    auto& n = tree_.nodes[static_cast<std::size_t>(id)];
    n.feature = best_feature;
    n.threshold = best_threshold;
    n.gain = best_gain;
    n.left = left_id;
    n.right = right_id;
    return id;
  }

  const Matrix& X_;
  const std::vector<std::vector<std::size_t>>& sorted_;
  const GbtParams& p_;
  std::vector<int> node_of_;
  const std::vector<double>* g_ = nullptr;
  const std::vector<double>* h_ = nullptr;
  RegressionTree tree_;
};

}  // namespace

std::shared_ptr<const GradientBoostedTrees> fit_gbt(const Matrix& X, const Labels& y, const GbtParams& p) {
  check_training_input(X, y);
  if (p.n_estimators < 0) throw UsageError("n_estimators must be >= 0");
  if (p.max_depth < 0) throw UsageError("max_depth must be >= 0");
  if (p.gamma < 0.0 || p.lambda < 0.0 || p.learning_rate < 0.0) throw UsageError("gamma, lambda and learning rate must be >= 0");
  const auto n = y.size();
  const auto d = static_cast<std::size_t>(X.cols());

  std::vector<std::vector<std::size_t>> sorted(d, std::vector<std::size_t>(n));
  for (std::size_t f = 0; f < d; ++f) {
    auto& order = sorted[f];
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto col = static_cast<Eigen::Index>(f);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return X(static_cast<Eigen::Index>(a), col) < X(static_cast<Eigen::Index>(b), col);
    });
  }

  std::vector<double> F(n, 0.0), g(n), h(n);
  auto mean_loss = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += logistic_loss(y[i], F[i]);
    return s / static_cast<double>(n);
  };

  std::vector<RegressionTree> stages;
  std::vector<double> losses{mean_loss()};
  StageBuilder builder(X, sorted, p);
  for (int m = 0; m < p.n_estimators; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto gh = logistic_grad_hess(y[i], F[i]);
      g[i] = gh.g;
      h[i] = gh.h;
    }
    auto tree = builder.build(g, h);
    const auto& leaf_of = builder.assignment();
    for (std::size_t i = 0; i < n; ++i) F[i] += p.learning_rate * tree.nodes[static_cast<std::size_t>(leaf_of[i])].value;
    stages.push_back(std::move(tree));
    losses.push_back(mean_loss());
  }
  if (!std::isfinite(losses.back())) throw NumericError("fit_gbt: training loss is not finite");

  auto model = std::make_shared<GradientBoostedTrees>(std::move(stages), p.learning_rate, d);
  model->training_loss = std::move(losses);
  return model;
}

}  // namespace revboost
