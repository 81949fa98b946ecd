#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "revboost/gbt.hpp"
#include "support.hpp"

using namespace revboost;

namespace {

double accuracy(const Classifier& m, const Matrix& X, const Labels& y) {
  const auto p = m.predict_labels(X);
  int ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ok += p[i] == y[i];
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

void balanced(Matrix& X, Labels& y) {
  fixtures::blobs(40, 3, 3.0, 6, X, y);
  REQUIRE(std::count(y.begin(), y.end(), 1) == 20);
}

}  // namespace

TEST_CASE("logistic derivatives") {
  auto gh = logistic_grad_hess(1, 0.0);
  CHECK(gh.g == doctest::Approx(-0.5));
  CHECK(gh.h == doctest::Approx(0.25));
  gh = logistic_grad_hess(0, 0.0);
  CHECK(gh.g == doctest::Approx(0.5));
  gh = logistic_grad_hess(1, 50.0);
  CHECK(std::abs(gh.g) < 1e-20);
  CHECK(gh.h < 1e-20);
  gh = logistic_grad_hess(1, -800.0);
  CHECK(gh.g == -1.0);
  CHECK(std::isfinite(logistic_loss(1, -800.0)));
  CHECK(logistic_loss(1, -800.0) == doctest::Approx(800.0));
  CHECK(logistic_loss(0, 0.0) == doctest::Approx(std::log(2.0)));
  // Central-difference oracle.
  for (double s : {-3.0, -0.4, 0.0, 1.7}) {
    for (int y : {0, 1}) {
      const double e = 1e-5;
      const double num_g = (logistic_loss(y, s + e) - logistic_loss(y, s - e)) / (2 * e);
      const double num_h = (logistic_grad_hess(y, s + e).g - logistic_grad_hess(y, s - e).g) / (2 * e);
      CHECK(logistic_grad_hess(y, s).g == doctest::Approx(num_g).epsilon(1e-6));
      CHECK(logistic_grad_hess(y, s).h == doctest::Approx(num_h).epsilon(1e-6));
    }
  }
}

TEST_CASE("degenerate settings predict one half") {
  Matrix X;
  Labels y;
  balanced(X, y);
  GbtParams p;
  SUBCASE("huge gamma") { p.gamma = 1e9; }
  SUBCASE("zero learning rate") { p.learning_rate = 0.0; }
  SUBCASE("no stages") { p.n_estimators = 0; }
  const auto m = fit_gbt(X, y, p);
  for (Eigen::Index i = 0; i < X.rows(); ++i) CHECK(m->predict(row_of(X, i)).score == doctest::Approx(0.5));
}

TEST_CASE("hand-built stages") {
  RegressionTree leaf;
  RegressionNode n;
  n.value = 1.0;
  leaf.nodes = {n};
  GradientBoostedTrees m({leaf, leaf}, 0.5, 1);
  const auto p = m.predict(std::vector<double>{0.0});
  CHECK(p.score == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(p.score == doctest::Approx(0.731).epsilon(1e-3));
  CHECK(p.label == 1);
  CHECK_THROWS_AS(m.predict(std::vector<double>{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("separable data is fit") {
  Matrix X;
  Labels y;
  fixtures::blobs(60, 4, 6.0, 2, X, y);
  GbtParams p;
  p.n_estimators = 100;
  p.learning_rate = 0.1;
  const auto m = fit_gbt(X, y, p);
  CHECK(accuracy(*m, X, y) == 1.0);
  CHECK(m->training_loss.back() < 0.01);
}

TEST_CASE("structural invariants and loss trajectory") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Matrix X;
    Labels y;
    fixtures::random_dataset(20 + seed, 1 + seed % 6, seed, X, y);
    GbtParams p;
    p.n_estimators = 20;
    p.max_depth = 3 + static_cast<int>(seed % 2);
    p.gamma = seed % 3 == 0 ? 0.0 : 0.05;
    p.learning_rate = 0.1;
    const auto m = fit_gbt(X, y, p);
    REQUIRE(m->training_loss.size() == 21);
    CHECK(m->training_loss[0] == doctest::Approx(std::log(2.0)));
    for (std::size_t k = 1; k < m->training_loss.size(); ++k) CHECK(m->training_loss[k] <= m->training_loss[k - 1] + 1e-12);
    for (const auto& t : m->stages()) {
      CHECK(t.depth() <= p.max_depth);
      for (const auto& n : t.nodes)
        if (!n.is_leaf()) {
          CHECK(n.gain > 0.0);
          CHECK(t.nodes[static_cast<std::size_t>(n.left)].depth == n.depth + 1);
        }
    }
    // Raw score is the shrunken sum of the stage outputs.
    const auto x = row_of(X, 0);
    double s = 0.0;
    for (const auto& t : m->stages()) s += p.learning_rate * t.eval(x);
    CHECK(m->raw_score(x) == doctest::Approx(s));
  }
}

TEST_CASE("determinism and bad parameters") {
  Matrix X;
  Labels y;
  balanced(X, y);
  GbtParams p;
  p.n_estimators = 10;
  CHECK(fit_gbt(X, y, p)->to_json() == fit_gbt(X, y, p)->to_json());
  p.gamma = -1.0;
  CHECK_THROWS_AS(fit_gbt(X, y, p), UsageError);
}
