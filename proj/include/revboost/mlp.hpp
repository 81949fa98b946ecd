#pragma once

#include <cstdint>
#include <vector>

#include "revboost/classifier.hpp"

namespace revboost {

enum class Activation { relu, tanh, logistic, identity };

std::string to_string(Activation a);
Activation parse_activation(std::string_view s);

double activate(Activation kind, double x);

struct MlpParams {
  int max_iterations = 600;  // training epochs, no early stopping
  std::vector<int> hidden_layers{10, 10};
  Activation activation = Activation::relu;
  double learning_rate = 1e-3;
  int batch_size = 0;  // 0 means min(32, n)
  std::uint64_t seed = 0;
};

/// Layer parameters. Hidden layers use `activation`; the single output unit
/// is always logistic.
struct MlpNetwork {
  std::vector<Eigen::MatrixXd> weights;  // out x in
  std::vector<Eigen::VectorXd> biases;
  Activation activation = Activation::relu;

  std::size_t input_dim() const { return static_cast<std::size_t>(weights.front().cols()); }
  /// Raw output before the final logistic.
  double logit(std::span<const double> x) const;
};

/// Scaled-uniform initialisation with bound sqrt(3 / fan_in) (times sqrt(2) for relu).
MlpNetwork init_network(std::size_t input_dim, const std::vector<int>& hidden, Activation act, std::uint64_t seed);

struct MlpGradient {
  double loss = 0.0;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// Weighted binary cross-entropy averaged over rows, with its gradient.
MlpGradient mlp_loss_gradient(const MlpNetwork& net, const Matrix& X, const Labels& y, const Weights& w);
double mlp_loss(const MlpNetwork& net, const Matrix& X, const Labels& y, const Weights& w);

class MlpModel final : public Classifier {
 public:
  explicit MlpModel(MlpNetwork net);

  Prediction predict(std::span<const double> x) const override;
  std::size_t input_dim() const override { return net_.input_dim(); }
  nlohmann::ordered_json to_json() const override;

  const MlpNetwork& network() const { return net_; }
  std::vector<double> epoch_losses;

 private:
  MlpNetwork net_;
};

/// Mini-batch Adam on weighted cross-entropy for max_iterations epochs.
std::shared_ptr<const MlpModel> fit_mlp(const Matrix& X, const Labels& y, const Weights& w, const MlpParams& p);

}  // namespace revboost
