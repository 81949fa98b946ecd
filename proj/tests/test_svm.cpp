#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "revboost/svm.hpp"
#include "support.hpp"

using namespace revboost;

namespace {

double accuracy(const Classifier& m, const Matrix& X, const Labels& y) {
  const auto p = m.predict_labels(X);
  int ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ok += p[i] == y[i];
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

Matrix signed_gram(const Matrix& X, const SvmSolution& s) {
  const auto n = X.rows();
  Matrix Q(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      Q(i, j) = s.y[static_cast<std::size_t>(i)] * s.y[static_cast<std::size_t>(j)] * s.kernel(row_of(X, i), row_of(X, j));
  return Q;
}

double dual_objective(const Matrix& Q, const Eigen::VectorXd& a) { return a.sum() - 0.5 * a.dot(Q * a); }

// Euclidean projection onto {0 <= a <= C, y'a = 0}: a = clip(v - mu y) with mu
// found by bisection, y'a being non-increasing in mu.
Eigen::VectorXd project(const Eigen::VectorXd& v, const std::vector<int>& y, const std::vector<double>& C) {
  auto at = [&](double mu) {
    Eigen::VectorXd a(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      a(i) = std::clamp(v(i) - mu * y[static_cast<std::size_t>(i)], 0.0, C[static_cast<std::size_t>(i)]);
    return a;
  };
  auto ya = [&](const Eigen::VectorXd& a) {
    double s = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += y[static_cast<std::size_t>(i)] * a(i);
    return s;
  };
  double lo = -1e6, hi = 1e6;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    (ya(at(mid)) > 0 ? lo : hi) = mid;
  }
  return at((lo + hi) / 2);
}

// Accelerated projected gradient ascent on the dual.
double oracle_dual_optimum(const Matrix& Q, const std::vector<int>& y, const std::vector<double>& C) {
  const double L = Eigen::SelfAdjointEigenSolver<Matrix>(Q).eigenvalues().maxCoeff();
  const auto n = Q.rows();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n), z = a;
  double t = 1.0;
  for (int it = 0; it < 20000; ++it) {
    const Eigen::VectorXd grad = Eigen::VectorXd::Ones(n) - Q * z;
    const Eigen::VectorXd next = project(z + grad / L, y, C);
    const double t2 = (1 + std::sqrt(1 + 4 * t * t)) / 2;
    z = next + ((t - 1) / t2) * (next - a);
    a = next;
    t = t2;
  }
  return dual_objective(Q, a);
}

}  // namespace

TEST_CASE("kernels") {
  const std::vector<double> a{0, 0}, b{1, 0}, c{1, 2}, d{3, 4};
  Kernel rbf{KernelKind::rbf, 1.0, 3, 0.0};
  CHECK(rbf(a, a) == 1.0);
  CHECK(rbf(c, c) == 1.0);
  CHECK(rbf(a, b) == doctest::Approx(std::exp(-1.0)));
  Kernel lin{KernelKind::linear, 1.0, 3, 0.0};
  CHECK(lin(c, d) == 11.0);
  Kernel poly{KernelKind::polynomial, 0.5, 2, 1.0};
  CHECK(poly(c, d) == doctest::Approx(std::pow(0.5 * 11 + 1, 2)));
  Kernel sig{KernelKind::sigmoid, 0.1, 3, 0.0};
  CHECK(sig(c, d) == doctest::Approx(std::tanh(1.1)));
  CHECK_THROWS_AS(lin(a, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("gamma resolution") {
  CHECK(resolve_gamma(GammaMode::automatic, Matrix::Zero(3, 50)) == doctest::Approx(0.02));
  Matrix X(2, 2);
  X << 0, 1, 0, 1;
  CHECK(resolve_gamma(GammaMode::scale, X) == doctest::Approx(2.0));
  CHECK_THROWS_AS(resolve_gamma(GammaMode::scale, Matrix::Constant(3, 2, 4.0)), DataError);
  CHECK(parse_gamma_mode("auto") == GammaMode::automatic);
  CHECK(to_string(GammaMode::automatic) == "auto");
  CHECK_THROWS_AS(parse_kernel("cubic"), UsageError);
}

TEST_CASE("hand-built model") {
  Matrix sv(2, 1);
  sv << 1, 0;
  SvmModel m(sv, {0.2, -0.2}, 0.2, Kernel{KernelKind::linear, 1.0, 3, 0.0});
  const auto p = m.predict(std::vector<double>{1.0});
  CHECK(m.decision(std::vector<double>{1.0}) == doctest::Approx(0.4));
  CHECK(p.label == 1);
  CHECK(m.predict(std::vector<double>{-5.0}).label == 0);
}

TEST_CASE("separable data, linear kernel") {
  Matrix X;
  Labels y;
  fixtures::blobs(40, 3, 6.0, 11, X, y);
  SvmParams p;
  p.kernel = KernelKind::linear;
  p.C = 1000;
  const auto m = fit_svm(X, y, {}, p);
  CHECK(accuracy(*m, X, y) == 1.0);
  SUBCASE("uniform weights leave the decision function unchanged") {
    for (double c : {1.0, 2.0, 0.25}) {
      const auto mw = fit_svm(X, y, Weights(40, c), p);
      for (Eigen::Index i = 0; i < X.rows(); ++i)
        CHECK(mw->decision(row_of(X, i)) == doctest::Approx(m->decision(row_of(X, i))).epsilon(1e-9));
    }
  }
}

TEST_CASE("XOR with the rbf kernel") {
  Matrix X;
  Labels y;
  fixtures::exact_xor(X, y);
  SvmParams p;
  p.C = 10;
  CHECK(accuracy(*fit_svm(X, y, {}, p), X, y) == 1.0);
}

TEST_CASE("KKT conditions and equality constraint") {
  const KernelKind kinds[] = {KernelKind::rbf, KernelKind::linear, KernelKind::polynomial, KernelKind::sigmoid};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Matrix X;
    Labels y;
    fixtures::random_dataset(10 + seed % 30, 1 + seed % 5, seed, X, y);
    SvmParams p;
    p.kernel = kinds[seed % 4];
    p.C = seed % 3 == 0 ? 0.5 : 10.0;
    Weights w;
    if (seed % 2) {
      Rng rng(seed);
      for (Eigen::Index i = 0; i < X.rows(); ++i) w.push_back(0.2 + uniform01(rng));
    }
    const auto s = solve_svm_dual(X, y, w, p);
    REQUIRE(s.converged);
    double ya = 0.0;
    for (std::size_t i = 0; i < s.alpha.size(); ++i) {
      ya += s.alpha[i] * s.y[i];
      CHECK(s.alpha[i] >= 0.0);
      CHECK(s.alpha[i] <= s.upper[i]);
    }
    CHECK(std::abs(ya) < 1e-6);
    if (p.kernel == KernelKind::sigmoid) continue;  // not PSD; only feasibility is guaranteed
    const auto m = model_from_solution(X, s);
    for (std::size_t i = 0; i < s.alpha.size(); ++i) {
      const double margin = s.y[i] * m->decision(row_of(X, static_cast<Eigen::Index>(i)));
      if (s.alpha[i] == 0.0) CHECK(margin >= 1.0 - 1e-3);
      else if (s.alpha[i] == s.upper[i]) CHECK(margin <= 1.0 + 1e-3);
      else CHECK(std::abs(margin - 1.0) <= 1e-3);
    }
  }
}

TEST_CASE("dual optimum matches a projected-gradient oracle") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Matrix X;
    Labels y;
    fixtures::random_dataset(4 + seed % 9, 2, 100 + seed, X, y);
    SvmParams p;
    p.kernel = seed % 2 ? KernelKind::rbf : KernelKind::linear;
    p.C = seed % 3 == 0 ? 0.3 : 5.0;
    p.tol = 1e-8;
    const auto s = solve_svm_dual(X, y, {}, p);
    const Matrix Q = signed_gram(X, s);
    const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(s.alpha.data(), static_cast<Eigen::Index>(s.alpha.size()));
    const double ours = dual_objective(Q, a);
    CHECK(ours == doctest::Approx(s.objective).epsilon(1e-9));
    const double oracle = oracle_dual_optimum(Q, s.y, s.upper);
    CHECK(fixtures::rel_error(ours, oracle) < 1e-3);
  }
}

TEST_CASE("bad input") {
  Matrix X(3, 1);
  X << 0, 1, 2;
  CHECK_THROWS_AS(fit_svm(X, {1, 1, 1}, {}, {}), DataError);
  SvmParams p;
  p.C = 0;
  CHECK_THROWS_AS(fit_svm(X, {0, 1, 1}, {}, p), UsageError);
}
