#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "revboost/tree.hpp"
#include "support.hpp"

using namespace revboost;

namespace {

double accuracy(const Classifier& m, const Matrix& X, const Labels& y) {
  const auto p = m.predict_labels(X);
  int ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ok += p[i] == y[i];
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

double closed_form(double w0, double w1, Criterion c) {
  const double p = w1 / (w0 + w1), q = 1.0 - p;
  if (c == Criterion::gini) return 1.0 - p * p - q * q;
  double h = 0.0;
  if (p > 0) h -= p * std::log2(p);
  if (q > 0) h -= q * std::log2(q);
  return h;
}

// Every axis-aligned tree of depth <= 2 over midpoint thresholds; true when
// one of them classifies all points.
bool perfect_depth2_tree_exists(const Matrix& X, const Labels& y) {
  std::vector<std::pair<int, double>> splits;
  for (int f = 0; f < X.cols(); ++f) {
    std::vector<double> v;
    for (Eigen::Index i = 0; i < X.rows(); ++i) v.push_back(X(i, f));
    std::sort(v.begin(), v.end());
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
      if (v[k] < v[k + 1]) splits.emplace_back(f, (v[k] + v[k + 1]) / 2);
  }
  auto pure = [&](const std::vector<Eigen::Index>& rows) {
    for (auto r : rows)
      if (y[static_cast<std::size_t>(r)] != y[static_cast<std::size_t>(rows[0])]) return false;
    return true;
  };
  auto side_ok = [&](const std::vector<Eigen::Index>& rows) {
    if (pure(rows)) return true;
    for (const auto& [f, t] : splits) {
      std::vector<Eigen::Index> l, r;
      for (auto i : rows) (X(i, f) <= t ? l : r).push_back(i);
      if (pure(l) && pure(r)) return true;
    }
    return false;
  };
  for (const auto& [f, t] : splits) {
    std::vector<Eigen::Index> l, r;
    for (Eigen::Index i = 0; i < X.rows(); ++i) (X(i, f) <= t ? l : r).push_back(i);
    if (side_ok(l) && side_ok(r)) return true;
  }
  return false;
}

void check_structure(const DecisionTree& t, const TreeParams& p) {
  for (const auto& n : t.nodes()) {
    CHECK(n.depth <= p.max_depth);
    CHECK(n.weight[0] + n.weight[1] > 0.0);
    if (n.is_leaf()) continue;
    const auto& l = t.nodes()[static_cast<std::size_t>(n.left)];
    const auto& r = t.nodes()[static_cast<std::size_t>(n.right)];
    CHECK(l.depth == n.depth + 1);
    CHECK(r.depth == n.depth + 1);
    // Gain recomputed from the stored class weights.
    const double parent = (n.weight[0] + n.weight[1]) * closed_form(n.weight[0], n.weight[1], p.criterion);
    const double children = (l.weight[0] + l.weight[1]) * closed_form(l.weight[0], l.weight[1], p.criterion) +
                            (r.weight[0] + r.weight[1]) * closed_form(r.weight[0], r.weight[1], p.criterion);
    CHECK(parent - children > 0.0);
    CHECK(n.gain > 0.0);
  }
}

}  // namespace

TEST_CASE("impurity closed forms") {
  CHECK(impurity(std::vector<int>{0, 0, 1, 1}, Criterion::gini) == doctest::Approx(0.5));
  CHECK(impurity(std::vector<int>{1, 1, 1, 1}, Criterion::entropy) == 0.0);
  CHECK(impurity(std::vector<int>{1, 1, 1, 0}, Criterion::gini) == doctest::Approx(0.375));
  CHECK(impurity(std::vector<int>{1, 1, 1, 0}, Criterion::entropy) == doctest::Approx(0.8113).epsilon(1e-4));
  CHECK_THROWS(impurity(std::vector<int>{}, Criterion::gini));
}

TEST_CASE("impurity bounds") {
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; ++b) {
      if (a + b == 0) continue;
      for (auto c : {Criterion::gini, Criterion::entropy}) {
        const double v = impurity(a, b, c);
        CHECK(v >= 0.0);
        CHECK(v <= (c == Criterion::gini ? 0.5 : 1.0) + 1e-15);
        CHECK((v == 0.0) == (a == 0 || b == 0));
        CHECK(v == doctest::Approx(closed_form(a, b, c)).epsilon(1e-12));
      }
    }
}

TEST_CASE("separable 1-D data gives one split at 1.5") {
  Matrix X(4, 1);
  X << 0, 1, 2, 3;
  const Labels y{0, 0, 1, 1};
  const auto t = fit_tree(X, y, {}, {3, Splitter::best, Criterion::gini, 0, 0});
  REQUIRE(t->nodes().size() == 3);
  CHECK(t->nodes()[0].threshold == 1.5);
  CHECK(accuracy(*t, X, y) == 1.0);
  const std::vector<double> x{1.4};
  CHECK(&t->leaf_for(x) == &t->nodes()[static_cast<std::size_t>(t->nodes()[0].left)]);
  CHECK(t->predict(x).label == 0);
  CHECK(t->predict(std::vector<double>{3.0}).score == 1.0);
  CHECK_THROWS_AS(t->predict(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("pure labels give a single leaf") {
  Matrix X(3, 2);
  X << 0, 1, 2, 3, 4, 5;
  const auto t = fit_tree(X, {1, 1, 1}, {}, {});
  CHECK(t->nodes().size() == 1);
  CHECK(t->depth() == 0);
  CHECK(t->predict(std::vector<double>{9, 9}).label == 1);
}

TEST_CASE("weighted leaf") {
  Matrix X(2, 1);
  X << 0, 0;
  const auto t = fit_tree(X, {0, 1}, {1.0, 3.0}, {});
  const auto p = t->predict(std::vector<double>{0.0});
  CHECK(p.label == 1);
  CHECK(p.score == doctest::Approx(0.75));
}

TEST_CASE("XOR") {
  Matrix X;
  Labels y;
  SUBCASE("jittered corners are fit perfectly") {
    fixtures::jittered_xor(X, y);
    CHECK(perfect_depth2_tree_exists(X, y));
    for (auto c : {Criterion::gini, Criterion::entropy}) {
      const auto t = fit_tree(X, y, {}, {3, Splitter::best, c, 0, 0});
      CHECK(accuracy(*t, X, y) == 1.0);
    }
  }
  SUBCASE("exact corners: a perfect tree exists but no first split has positive gain") {
    fixtures::exact_xor(X, y);
    CHECK(perfect_depth2_tree_exists(X, y));
    const auto t = fit_tree(X, y, {}, {3, Splitter::best, Criterion::gini, 0, 0});
    CHECK(t->nodes().size() == 1);
  }
}

TEST_CASE("structural invariants on random data") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Matrix X;
    Labels y;
    const std::size_t n = 2 + seed % 63, d = 1 + seed % 10;
    fixtures::random_dataset(n, d, seed, X, y);
    TreeParams p;
    p.max_depth = 3 + static_cast<int>(seed % 2);
    p.splitter = seed % 3 == 0 ? Splitter::random : Splitter::best;
    p.criterion = seed % 4 < 2 ? Criterion::gini : Criterion::entropy;
    p.seed = seed;
    const auto t = fit_tree(X, y, {}, p);
    CHECK(t->depth() <= p.max_depth);
    check_structure(*t, p);
  }
}

TEST_CASE("uniform weights match the unweighted fit") {
  Matrix X;
  Labels y;
  fixtures::random_dataset(40, 5, 3, X, y);
  for (auto s : {Splitter::best, Splitter::random}) {
    TreeParams p{4, s, Criterion::entropy, 9, 0};
    const auto a = fit_tree(X, y, {}, p);
    const auto b = fit_tree(X, y, Weights(40, 1.0), p);
    const auto c = fit_tree(X, y, Weights(40, 2.0), p);
    CHECK(a->to_json()["nodes"].size() == b->to_json()["nodes"].size());
    CHECK(a->predict_labels(X) == b->predict_labels(X));
    CHECK(a->predict_labels(X) == c->predict_labels(X));
    for (std::size_t k = 0; k < a->nodes().size(); ++k) {
      CHECK(a->nodes()[k].feature == c->nodes()[k].feature);
      CHECK(a->nodes()[k].threshold == c->nodes()[k].threshold);
    }
  }
}

TEST_CASE("zero-weight samples take no part") {
  Matrix X(5, 1);
  X << 0, 1, 2, 3, 10;
  const Labels y{0, 0, 1, 1, 0};
  const auto with = fit_tree(X, y, {1, 1, 1, 1, 0}, {});
  const auto without = fit_tree(X.topRows(4), {0, 0, 1, 1}, {}, {});
  CHECK(with->nodes().size() == without->nodes().size());
  CHECK(with->nodes()[0].threshold == without->nodes()[0].threshold);
}

TEST_CASE("random splitter is seeded") {
  Matrix X;
  Labels y;
  fixtures::random_dataset(50, 6, 1, X, y);
  TreeParams p{4, Splitter::random, Criterion::gini, 1, 0};
  const auto a = fit_tree(X, y, {}, p), b = fit_tree(X, y, {}, p);
  CHECK(a->to_json() == b->to_json());
  bool differs = false;
  for (std::uint64_t s = 2; s < 10 && !differs; ++s) {
    p.seed = s;
    differs = fit_tree(X, y, {}, p)->to_json() != a->to_json();
  }
  CHECK(differs);
}

TEST_CASE("bad input") {
  Matrix X(2, 1);
  X << 0, 1;
  CHECK_THROWS_AS(fit_tree(X, {0}, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(fit_tree(X, {0, 1}, {1.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(fit_tree(X, {0, 2}, {}, {}), std::invalid_argument);
}
