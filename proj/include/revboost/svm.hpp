#pragma once

#include <cstdint>
#include <vector>

#include "revboost/classifier.hpp"

namespace revboost {

enum class KernelKind { linear, rbf, polynomial, sigmoid };
enum class GammaMode { scale, automatic };

std::string to_string(KernelKind k);
std::string to_string(GammaMode g);
KernelKind parse_kernel(std::string_view s);
GammaMode parse_gamma_mode(std::string_view s);

struct Kernel {
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0;
  int degree = 3;
  double coef0 = 0.0;

  double operator()(std::span<const double> x, std::span<const double> z) const;
};

/// scale: 1 / (d * pooled variance of all entries); automatic: 1 / d.
double resolve_gamma(GammaMode mode, const Matrix& X);

struct SvmParams {
  KernelKind kernel = KernelKind::rbf;
  double C = 1.0;
  int degree = 3;
  GammaMode gamma_mode = GammaMode::scale;
  std::uint64_t seed = 0;
  double tol = 1e-3;
  /// Iteration cap expressed in passes; one pass is n pair updates.
  int max_passes = 10000;
};

/// Decision function f(x) = sum_i coef_i K(sv_i, x) + b, with coef_i = alpha_i y_i
/// and y = +1 for fake, -1 for real. f(x) >= 0 predicts fake.
class SvmModel final : public Classifier {
 public:
  SvmModel(Matrix support_vectors, std::vector<double> coefficients, double bias, Kernel kernel);

  Prediction predict(std::span<const double> x) const override;
  std::size_t input_dim() const override { return static_cast<std::size_t>(support_vectors_.cols()); }
  nlohmann::ordered_json to_json() const override;

  double decision(std::span<const double> x) const;
  const Matrix& support_vectors() const { return support_vectors_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double bias() const { return bias_; }
  const Kernel& kernel() const { return kernel_; }

 private:
  Matrix support_vectors_;
  std::vector<double> coefficients_;
  double bias_;
  Kernel kernel_;
};

/// Full dual solution, kept for inspection and tests.
struct SvmSolution {
  std::vector<double> alpha;
  std::vector<double> upper;  // per-sample box C_i
  std::vector<int> y;         // +1 / -1
  double bias = 0.0;
  double objective = 0.0;  // dual objective sum(alpha) - 1/2 alpha' Q alpha
  std::size_t iterations = 0;
  bool converged = false;
  Kernel kernel;
};

/// SMO on the soft-margin dual with box constraints C_i = C * w_i (w rescaled
/// to mean 1) and maximal-violating-pair working set selection.
SvmSolution solve_svm_dual(const Matrix& X, const Labels& y, const Weights& w, const SvmParams& p);

std::shared_ptr<const SvmModel> fit_svm(const Matrix& X, const Labels& y, const Weights& w, const SvmParams& p);

/// Model from a solved dual; keeps samples with alpha > 0.
std::shared_ptr<const SvmModel> model_from_solution(const Matrix& X, const SvmSolution& s);

}  // namespace revboost
