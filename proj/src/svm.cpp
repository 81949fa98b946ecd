#include "revboost/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace revboost {

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::linear: return "linear";
    case KernelKind::rbf: return "rbf";
    case KernelKind::polynomial: return "polynomial";
    case KernelKind::sigmoid: return "sigmoid";
  }
  return "?";
}

std::string to_string(GammaMode g) { return g == GammaMode::scale ? "scale" : "auto"; }

KernelKind parse_kernel(std::string_view s) {
  if (s == "linear") return KernelKind::linear;
  if (s == "rbf") return KernelKind::rbf;
  if (s == "polynomial" || s == "poly") return KernelKind::polynomial;
  if (s == "sigmoid") return KernelKind::sigmoid;
  throw UsageError("unknown kernel '" + std::string(s) + "'");
}

GammaMode parse_gamma_mode(std::string_view s) {
  if (s == "scale") return GammaMode::scale;
  if (s == "auto") return GammaMode::automatic;
  throw UsageError("unknown gamma mode '" + std::string(s) + "'");
}

double Kernel::operator()(std::span<const double> x, std::span<const double> z) const {
  check_input_dim(x.size(), z.size());
  if (kind == KernelKind::rbf) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - z[k]) * (x[k] - z[k]);
    return std::exp(-gamma * d2);
  }
  double dot = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) dot += x[k] * z[k];
  switch (kind) {
    case KernelKind::linear: return dot;
    case KernelKind::polynomial: return std::pow(gamma * dot + coef0, degree);
    case KernelKind::sigmoid: return std::tanh(gamma * dot + coef0);
    default: return 0.0;
  }
}

double resolve_gamma(GammaMode mode, const Matrix& X) {
  const auto d = static_cast<double>(X.cols());
  if (X.size() == 0) throw std::invalid_argument("resolve_gamma: empty matrix");
  if (mode == GammaMode::automatic) return 1.0 / d;
  const double mean = X.mean();
  const double var = (X.array() - mean).square().mean();
  if (!(var > 0.0)) throw DataError("resolve_gamma: pooled variance is zero, gamma=scale is undefined");
  return 1.0 / (d * var);
}

SvmModel::SvmModel(Matrix support_vectors, std::vector<double> coefficients, double bias, Kernel kernel)
    : support_vectors_(std::move(support_vectors)), coefficients_(std::move(coefficients)), bias_(bias), kernel_(kernel) {
  if (static_cast<std::size_t>(support_vectors_.rows()) != coefficients_.size())
    throw std::invalid_argument("SvmModel: one coefficient per support vector required");
}

double SvmModel::decision(std::span<const double> x) const {
  check_input_dim(input_dim(), x.size());
  double f = bias_;
  for (std::size_t i = 0; i < coefficients_.size(); ++i)
    f += coefficients_[i] * kernel_(row_of(support_vectors_, static_cast<Eigen::Index>(i)), x);
  return f;
}

Prediction SvmModel::predict(std::span<const double> x) const {
  const double f = decision(x);
  return {f >= 0.0 ? 1 : 0, f};
}

nlohmann::ordered_json SvmModel::to_json() const {
  nlohmann::ordered_json j;
  j["type"] = "svm";
  j["kernel"] = to_string(kernel_.kind);
  j["gamma"] = kernel_.gamma;
  j["degree"] = kernel_.degree;
  j["coef0"] = kernel_.coef0;
  j["bias"] = bias_;
  j["coefficients"] = coefficients_;
  j["support_vectors"] = {{"rows", support_vectors_.rows()},
                          {"cols", support_vectors_.cols()},
                          {"data", std::vector<double>(support_vectors_.data(), support_vectors_.data() + support_vectors_.size())}};
  return j;
}

namespace {

constexpr double kTau = 1e-12;  // curvature floor for non-PSD kernels

Kernel make_kernel(const SvmParams& p, const Matrix& X) {
  Kernel k;
  k.kind = p.kernel;
  k.degree = p.degree;
  switch (p.kernel) {
    case KernelKind::linear: k.gamma = 1.0; break;
    case KernelKind::rbf: k.gamma = resolve_gamma(p.gamma_mode, X); break;
    // gamma_mode is documented as rbf-only; these kernels still need a scale.
    case KernelKind::polynomial:
    case KernelKind::sigmoid: k.gamma = resolve_gamma(GammaMode::scale, X); break;
  }
  return k;
}

}  // namespace

SvmSolution solve_svm_dual(const Matrix& X, const Labels& y01, const Weights& w, const SvmParams& p) {
  if (!w.empty()) check_training_input(X, y01, &w);
  else check_training_input(X, y01);
  if (!(p.C > 0.0)) throw UsageError("SVM C must be > 0");
  if (p.kernel == KernelKind::polynomial && p.degree < 1) throw UsageError("polynomial degree must be >= 1");
  const bool has_pos = std::find(y01.begin(), y01.end(), 1) != y01.end();
  const bool has_neg = std::find(y01.begin(), y01.end(), 0) != y01.end();
  if (!has_pos || !has_neg) throw DataError("fit_svm: both classes must be present");

  const auto n = y01.size();
  SvmSolution s;
  s.kernel = make_kernel(p, X);
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.y[i] = y01[i] == 1 ? 1 : -1;
  const Weights wn = normalize_to_mean_one(w, n);
  s.upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.upper[i] = p.C * wn[i];

  Matrix Q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = s.y[i] * s.y[j] * s.kernel(row_of(X, static_cast<Eigen::Index>(i)), row_of(X, static_cast<Eigen::Index>(j)));
      Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      Q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  if (!Q.allFinite()) throw NumericError("fit_svm: kernel matrix has non-finite entries");

  auto& alpha = s.alpha;
  const auto& C = s.upper;
  const auto& y = s.y;
  alpha.assign(n, 0.0);
  std::vector<double> G(n, -1.0);
  auto in_up = [&](std::size_t t) { return (y[t] == 1 && alpha[t] < C[t]) || (y[t] == -1 && alpha[t] > 0.0); };
  auto in_low = [&](std::size_t t) { return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < C[t]); };

  const std::size_t max_iter = static_cast<std::size_t>(std::max(p.max_passes, 1)) * n;
  double m_up = 0.0, m_low = 0.0;
  for (s.iterations = 0; s.iterations < max_iter; ++s.iterations) {
    std::size_t i = n, j = n;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * G[t];
      if (in_up(t) && v > m_up) m_up = v, i = t;
      if (in_low(t) && v < m_low) m_low = v, j = t;
    }
    if (i == n || j == n || m_up - m_low < p.tol) {
      s.converged = true;
      break;
    }

    const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
    const double Ci = C[i], Cj = C[j];
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = Q(I, I) + Q(J, J) + 2.0 * Q(I, J);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) alpha[j] = 0.0, alpha[i] = diff;
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0, alpha[j] = -diff;
      }
      if (diff > Ci - Cj) {
        if (alpha[i] > Ci) alpha[i] = Ci, alpha[j] = Ci - diff;
      } else if (alpha[j] > Cj) {
        alpha[j] = Cj, alpha[i] = Cj + diff;
      }
    } else {
      double quad = Q(I, I) + Q(J, J) - 2.0 * Q(I, J);
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > Ci) {
        if (alpha[i] > Ci) alpha[i] = Ci, alpha[j] = sum - Ci;
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0, alpha[i] = sum;
      }
      if (sum > Cj) {
        if (alpha[j] > Cj) alpha[j] = Cj, alpha[i] = sum - Cj;
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0, alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      const auto T = static_cast<Eigen::Index>(t);
      G[t] += Q(T, I) * di + Q(T, J) * dj;
    }
  }

  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0.0 && alpha[t] < C[t]) {
      free_sum += -y[t] * G[t];
      ++free_count;
    }
  s.bias = free_count ? free_sum / static_cast<double>(free_count) : (m_up + m_low) / 2.0;
  if (!std::isfinite(s.bias)) s.bias = 0.0;

  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += alpha[t] - 0.5 * alpha[t] * (G[t] + 1.0);
  s.objective = obj;
  return s;
}

std::shared_ptr<const SvmModel> model_from_solution(const Matrix& X, const SvmSolution& s) {
  std::vector<std::size_t> sv;
  std::vector<double> coef;
  for (std::size_t i = 0; i < s.alpha.size(); ++i)
    if (s.alpha[i] > 0.0) {
      sv.push_back(i);
      coef.push_back(s.alpha[i] * s.y[i]);
    }
  return std::make_shared<const SvmModel>(take_rows(X, sv), std::move(coef), s.bias, s.kernel);
}

std::shared_ptr<const SvmModel> fit_svm(const Matrix& X, const Labels& y, const Weights& w, const SvmParams& p) {
  return model_from_solution(X, solve_svm_dual(X, y, w, p));
}

}  // namespace revboost
