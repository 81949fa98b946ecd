#include <doctest.h>

#include "revboost/forest.hpp"
#include "support.hpp"

using namespace revboost;

namespace {

double accuracy(const Classifier& m, const Matrix& X, const Labels& y) {
  const auto p = m.predict_labels(X);
  int ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ok += p[i] == y[i];
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

std::shared_ptr<const DecisionTree> leaf_tree(double w0, double w1) {
  TreeNode n;
  n.weight[0] = w0;
  n.weight[1] = w1;
  n.probability = w1 / (w0 + w1);
  n.label = w1 > w0 ? 1 : 0;
  return std::make_shared<const DecisionTree>(std::vector<TreeNode>{n}, 1, TreeParams{});
}

}  // namespace

TEST_CASE("max_features is the ceiling of the square root") {
  CHECK(forest_max_features(1) == 1);
  CHECK(forest_max_features(4) == 2);
  CHECK(forest_max_features(5) == 3);
  CHECK(forest_max_features(50) == 8);
  CHECK(forest_max_features(64) == 8);
  CHECK(forest_max_features(65) == 9);
  for (std::size_t d = 1; d < 2000; ++d) {
    const auto k = forest_max_features(d);
    CHECK(k * k >= d);
    CHECK((k - 1) * (k - 1) < d);
  }
}

TEST_CASE("bootstrap counts sum to n") {
  Rng rng(4);
  const auto c = bootstrap_counts(37, rng);
  double s = 0.0;
  for (double v : c) s += v;
  CHECK(s == 37.0);
}

TEST_CASE("one tree without bootstrap is the single tree fit") {
  Matrix X;
  Labels y;
  fixtures::random_dataset(60, 9, 2, X, y);
  ForestParams fp;
  fp.n_estimators = 1;
  fp.max_depth = 4;
  fp.bootstrap = false;
  fp.seed = 17;
  const auto f = fit_forest(X, y, fp);
  const auto t = fit_tree(X, y, {}, {4, Splitter::best, Criterion::gini, forest_tree_seed(17, 0), forest_max_features(9)});
  CHECK(f->trees()[0]->to_json() == t->to_json());
  for (Eigen::Index i = 0; i < X.rows(); ++i) CHECK(f->predict(row_of(X, i)).score == t->predict(row_of(X, i)).score);
}

TEST_CASE("separable data is fit") {
  Matrix X;
  Labels y;
  fixtures::blobs(80, 4, 6.0, 5, X, y);
  ForestParams fp;
  fp.seed = 3;
  CHECK(accuracy(*fit_forest(X, y, fp), X, y) == 1.0);
}

TEST_CASE("determinism and thread invariance") {
  Matrix X;
  Labels y;
  fixtures::random_dataset(50, 6, 8, X, y);
  ForestParams fp;
  fp.n_estimators = 30;
  fp.seed = 21;
  const auto a = fit_forest(X, y, fp);
  const auto b = fit_forest(X, y, fp);
  fp.threads = 4;
  const auto c = fit_forest(X, y, fp);
  CHECK(a->to_json() == b->to_json());
  CHECK(a->to_json() == c->to_json());
}

TEST_CASE("vote by mean probability") {
  const std::vector<double> x{0.0};
  SUBCASE("0.2 and 0.8 tie to class 0") {
    RandomForest f({leaf_tree(4, 1), leaf_tree(1, 4)});
    CHECK(f.predict(x).score == doctest::Approx(0.5));
    CHECK(f.predict(x).label == 0);
  }
  SUBCASE("two ones and a zero") {
    RandomForest f({leaf_tree(0, 1), leaf_tree(0, 1), leaf_tree(1, 0)});
    CHECK(f.predict(x).score == doctest::Approx(2.0 / 3.0));
    CHECK(f.predict(x).label == 1);
  }
  RandomForest f({leaf_tree(0, 1)});
  CHECK_THROWS_AS(f.predict(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("bad parameters") {
  Matrix X;
  Labels y;
  fixtures::random_dataset(10, 2, 1, X, y);
  ForestParams fp;
  fp.n_estimators = 0;
  CHECK_THROWS_AS(fit_forest(X, y, fp), UsageError);
}
