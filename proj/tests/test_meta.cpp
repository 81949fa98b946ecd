#include <doctest.h>

#include <cmath>
#include <sstream>

#include "revboost/meta.hpp"
#include "revboost/metrics.hpp"
#include "revboost/rng.hpp"
#include "support.hpp"

using namespace revboost;

namespace {

class Constant final : public Classifier {
 public:
  explicit Constant(int label) : label_(label) {}
  Prediction predict(std::span<const double>) const override { return {label_, static_cast<double>(label_)}; }
  std::size_t input_dim() const override { return 1; }
  nlohmann::ordered_json to_json() const override { return {{"label", label_}}; }

 private:
  int label_;
};

ParamSet tree_params(int depth, const std::string& splitter = "best") {
  ParamSet p;
  p.set("criterion", std::string("gini"));
  p.set("max_depth", std::int64_t{depth});
  p.set("splitter", splitter);
  return p;
}

ParamSet mlp_params() {
  ParamSet p;
  p.set("max_iterations", std::int64_t{60});
  p.set("n_layers", std::int64_t{2});
  p.set("units_1", std::int64_t{6});
  p.set("units_2", std::int64_t{6});
  p.set("activation", std::string("tanh"));
  return p;
}

EnsembleParams params(EnsembleMethod m, ClassifierKind k, ParamSet ps, int n, std::uint64_t seed = 7) {
  EnsembleParams p;
  p.method = m;
  p.n_estimators = n;
  p.base = {k, std::move(ps), derive_seed(seed, "base")};
  p.seed = seed;
  return p;
}

void noisy(std::size_t n, std::uint64_t seed, Matrix& X, Labels& y) {
  fixtures::blobs(n, 3, 0.6, seed, X, y);
}

}  // namespace

TEST_CASE("SAMME weight") {
  CHECK(samme_alpha(0.1, 1.0) == doctest::Approx(std::log(9.0)));
  CHECK(samme_alpha(0.5, 1.0) == 0.0);
  CHECK(samme_alpha(0.25, 0.5) == doctest::Approx(0.5 * std::log(3.0)));
  CHECK(samme_alpha(0.7, 1.0) < 0.0);
}

TEST_CASE("weighted vote") {
  const std::vector<double> x{0.0};
  const std::vector<ClassifierPtr> one_zero{std::make_shared<Constant>(1), std::make_shared<Constant>(0)};
  EnsembleModel heavy(EnsembleMethod::adaboost, one_zero, {2.0, 1.0});
  CHECK(heavy.predict(x).label == 1);
  CHECK(heavy.predict(x).score == doctest::Approx(1.0 / 3.0));
  EnsembleModel tie(EnsembleMethod::adaboost, one_zero, {1.0, 1.0});
  CHECK(tie.predict(x).label == 0);
  CHECK(tie.predict(x).score == 0.0);
  EnsembleModel light(EnsembleMethod::adaboost, one_zero, {1.0, 2.0});
  CHECK(light.predict(x).label == 0);
  CHECK(heavy.prefix(1).predict(x).label == 1);
  CHECK(heavy.prefix(1).size() == 1);
  CHECK_THROWS_AS(EnsembleModel(EnsembleMethod::bagging, one_zero, {1.0}), std::invalid_argument);
  CHECK(parse_method("adaboost") == EnsembleMethod::adaboost);
  CHECK_THROWS_AS(parse_method("stacking"), UsageError);
}

TEST_CASE("bagging without resampling") {
  Matrix X;
  Labels y;
  noisy(40, 1, X, y);
  auto p = params(EnsembleMethod::bagging, ClassifierKind::tree, tree_params(3), 2);
  p.resample = false;
  const auto e = fit_bagging(X, y, p);
  REQUIRE(e->size() == 2);
  const auto single = fit_classifier(ClassifierKind::tree, p.base.params, X, y, {}, p.base.seed);
  for (std::size_t m = 0; m < 2; ++m) {
    const auto ref = fit_classifier(ClassifierKind::tree, p.base.params, X, y, {}, bagging_member_seed(p.base.seed, m));
    CHECK(e->members()[m]->to_json() == ref->to_json());
  }
  // Deterministic members agree, so the vote is the single tree.
  CHECK(e->predict_labels(X) == single->predict_labels(X));
  CHECK(e->alphas() == std::vector<double>{1.0, 1.0});
}

TEST_CASE("bagging members are fit on their bootstrap resample") {
  Matrix X;
  Labels y;
  noisy(30, 2, X, y);
  const auto p = params(EnsembleMethod::bagging, ClassifierKind::tree, tree_params(2, "random"), 5);
  const auto e = fit_bagging(X, y, p);
  for (std::size_t m = 0; m < 5; ++m) {
    Rng rng(derive_seed(p.seed, "bagging-resample", m));
    const auto idx = bootstrap_indices(30, rng);
    const auto ref = fit_classifier(ClassifierKind::tree, p.base.params, take_rows(X, idx), take(y, idx), {},
                                    bagging_member_seed(p.base.seed, m));
    CHECK(e->members()[m]->to_json() == ref->to_json());
  }
  auto threaded = p;
  threaded.threads = 3;
  CHECK(fit_bagging(X, y, threaded)->to_json() == e->to_json());
}

TEST_CASE("AdaBoost weight trajectory") {
  Matrix X;
  Labels y;
  noisy(50, 3, X, y);
  for (auto [kind, ps] : {std::pair{ClassifierKind::tree, tree_params(1)}, std::pair{ClassifierKind::mlp, mlp_params()}}) {
    CAPTURE(to_string(kind));
    const auto p = params(EnsembleMethod::adaboost, kind, ps, 8);
    std::vector<Weights> seen;
    const auto e = fit_adaboost(X, y, p, [&](std::size_t round, const Weights& w) {
      CHECK(round == seen.size());
      seen.push_back(w);
    });
    REQUIRE(e->size() >= 1);
    for (const auto& w : seen) {
      double s = 0.0;
      for (double v : w) {
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
    for (double v : seen[0]) CHECK(v == 1.0 / 50.0);

    // Round 0 is the stand-alone fit.
    const auto standalone = fit_classifier(kind, ps, X, y, {}, p.base.seed);
    CHECK(e->members()[0]->to_json() == standalone->to_json());

    // Kept rounds beat chance and carry their SAMME weight; weights evolve by
    // exp(alpha) on the misclassified samples.
    for (std::size_t m = 0; m < e->size(); ++m) {
      const auto pred = e->members()[m]->predict_labels(X);
      double err = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) err += pred[i] != y[i] ? seen[m][i] : 0.0;
      CHECK(err == doctest::Approx(e->round_errors[m]));
      CHECK(err < 0.5);
      CHECK(e->alphas()[m] == doctest::Approx(samme_alpha(err, 1.0)));
      if (m + 1 < seen.size()) {
        Weights next = seen[m];
        double total = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
          if (pred[i] != y[i]) next[i] *= std::exp(e->alphas()[m]);
          total += next[i];
        }
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(seen[m + 1][i] == doctest::Approx(next[i] / total).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("AdaBoost stopping rules") {
  SUBCASE("perfect first round") {
    Matrix X;
    Labels y;
    fixtures::blobs(30, 2, 8.0, 4, X, y);
    const auto e = fit_adaboost(X, y, params(EnsembleMethod::adaboost, ClassifierKind::tree, tree_params(3), 10));
    CHECK(e->size() == 1);
    CHECK(e->alphas()[0] == doctest::Approx(samme_alpha(kZeroErrorClamp, 1.0)));
  }
  SUBCASE("no skill in the first round") {
    Matrix X;
    Labels y;
    fixtures::blobs(30, 2, 8.0, 4, X, y);
    const auto e = fit_adaboost(X, y, params(EnsembleMethod::adaboost, ClassifierKind::tree, tree_params(0), 10));
    CHECK(e->size() == 1);
    CHECK(e->alphas()[0] == kNoSkillAlpha);
    CHECK(e->round_errors[0] == doctest::Approx(0.5));
  }
  SUBCASE("unweighted bases are refused") {
    Matrix X;
    Labels y;
    noisy(20, 1, X, y);
    ParamSet fp;
    fp.set("criterion", std::string("gini"));
    fp.set("max_depth", std::int64_t{3});
    fp.set("n_estimators", std::int64_t{5});
    CHECK_THROWS_AS(fit_adaboost(X, y, params(EnsembleMethod::adaboost, ClassifierKind::forest, fp, 3)), UsageError);
  }
}

TEST_CASE("prefixes equal smaller fits") {
  Matrix X;
  Labels y;
  noisy(40, 5, X, y);
  for (auto method : {EnsembleMethod::bagging, EnsembleMethod::adaboost}) {
    const auto big = fit_ensemble(X, y, params(method, ClassifierKind::tree, tree_params(1), 12));
    for (int k : {2, 5, 8}) {
      const auto small = fit_ensemble(X, y, params(method, ClassifierKind::tree, tree_params(1), k));
      const auto pre = big->prefix(static_cast<std::size_t>(std::min<std::size_t>(k, big->size())));
      CHECK(pre.to_json() == small->to_json());
    }
  }
}

TEST_CASE("sweep") {
  Matrix X, Xt;
  Labels y, yt;
  noisy(40, 6, X, y);
  noisy(20, 7, Xt, yt);
  const auto p = params(EnsembleMethod::adaboost, ClassifierKind::tree, tree_params(1), 1);
  const auto rows = sweep(X, y, Xt, yt, p, default_estimator_grid());
  REQUIRE(rows.size() == 11);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].n_estimators == static_cast<int>(2 + 2 * i));
    auto q = p;
    q.n_estimators = rows[i].n_estimators;
    const auto e = fit_ensemble(X, y, q);
    CHECK(rows[i].train_error == error_rate(y, e->predict_labels(X)));
    CHECK(rows[i].test_error == error_rate(yt, e->predict_labels(Xt)));
  }
  std::ostringstream out;
  write_sweep_csv(out, rows);
  CHECK(out.str().rfind("n_estimators,train_error,test_error\n2,", 0) == 0);
  CHECK_THROWS_AS(sweep(X, y, Xt, yt, p, {}), UsageError);
}
