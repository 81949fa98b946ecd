#include "revboost/mlp.hpp"

#include <cmath>
#include <numeric>

#include "revboost/gbt.hpp"
#include "revboost/rng.hpp"

namespace revboost {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::logistic: return "logistic";
    case Activation::identity: return "identity";
  }
  return "?";
}

Activation parse_activation(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "logistic") return Activation::logistic;
  if (s == "identity") return Activation::identity;
  throw UsageError("unknown activation '" + std::string(s) + "'");
}

double activate(Activation kind, double x) {
  switch (kind) {
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::tanh: return std::tanh(x);
    case Activation::logistic: return sigmoid(x);
    case Activation::identity: return x;
  }
  return x;
}

namespace {

void apply_activation(Activation kind, Eigen::MatrixXd& z) {
  switch (kind) {
    case Activation::relu: z = z.cwiseMax(0.0); break;
    case Activation::tanh: z = z.array().tanh(); break;
    case Activation::logistic: z = z.unaryExpr([](double v) { return sigmoid(v); }); break;
    case Activation::identity: break;
  }
}

// delta *= f'(z), written in terms of the activation output a = f(z).
void scale_by_derivative(Activation kind, const Eigen::MatrixXd& a, Eigen::MatrixXd& delta) {
  switch (kind) {
    case Activation::relu: delta = (a.array() > 0.0).select(delta, 0.0); break;
    case Activation::tanh: delta.array() *= 1.0 - a.array().square(); break;
    case Activation::logistic: delta.array() *= a.array() * (1.0 - a.array()); break;
    case Activation::identity: break;
  }
}

// Forward pass over a batch stored column-wise; acts[0] is the input.
void forward(const MlpNetwork& net, std::vector<Eigen::MatrixXd>& acts) {
  const auto L = net.weights.size();
  for (std::size_t l = 0; l < L; ++l) {
    acts[l + 1].noalias() = net.weights[l] * acts[l];
    acts[l + 1].colwise() += net.biases[l];
    if (l + 1 < L) apply_activation(net.activation, acts[l + 1]);
  }
}

// Fills grads for the batch and returns its mean weighted loss.
double backward(const MlpNetwork& net, std::vector<Eigen::MatrixXd>& acts, std::span<const double> targets,
                std::span<const double> weights, std::vector<Eigen::MatrixXd>& deltas, std::vector<Eigen::MatrixXd>& gw,
                std::vector<Eigen::VectorXd>& gb) {
  const auto L = net.weights.size();
  const auto B = acts[0].cols();
  const double inv_b = 1.0 / static_cast<double>(B);
  auto& top = deltas[L - 1];
  top.resize(1, B);
  double loss = 0.0;
  for (Eigen::Index c = 0; c < B; ++c) {
    const double z = acts[L](0, c);
    const auto k = static_cast<std::size_t>(c);
    const double y = targets[k];
    loss += weights[k] * (logistic_loss(static_cast<int>(y), z));
    top(0, c) = weights[k] * (sigmoid(z) - y) * inv_b;
  }
  for (std::size_t l = L; l-- > 0;) {
    gw[l].noalias() = deltas[l] * acts[l].transpose();
    gb[l] = deltas[l].rowwise().sum();
    if (l > 0) {
      deltas[l - 1].noalias() = net.weights[l].transpose() * deltas[l];
      scale_by_derivative(net.activation, acts[l], deltas[l - 1]);
    }
  }
  return loss * inv_b;
}

Eigen::MatrixXd batch_columns(const Matrix& X, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(X.cols(), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = X.row(static_cast<Eigen::Index>(rows[c])).transpose();
  return out;
}

}  // namespace

double MlpNetwork::logit(std::span<const double> x) const {
  check_input_dim(input_dim(), x.size());
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::VectorXd z = weights[l] * a + biases[l];
    if (l + 1 < weights.size())
      for (auto& v : z) v = activate(activation, v);
    a = std::move(z);
  }
  return a(0);
}

MlpNetwork init_network(std::size_t input_dim, const std::vector<int>& hidden, Activation act, std::uint64_t seed) {
  if (input_dim == 0) throw std::invalid_argument("init_network: zero input dimension");
  MlpNetwork net;
  net.activation = act;
  Rng rng(derive_seed(seed, "mlp-init"));
  auto fan_in = static_cast<Eigen::Index>(input_dim);
  std::vector<int> widths = hidden;
  widths.push_back(1);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    if (widths[l] < 1) throw UsageError("hidden layer widths must be >= 1");
    const bool hidden_layer = l + 1 < widths.size();
    const double gain = hidden_layer && act == Activation::relu ? std::sqrt(2.0) : 1.0;
    const double bound = gain * std::sqrt(3.0 / static_cast<double>(fan_in));
    Eigen::MatrixXd W(widths[l], fan_in);
    for (Eigen::Index c = 0; c < W.cols(); ++c)
      for (Eigen::Index r = 0; r < W.rows(); ++r) W(r, c) = uniform_real(rng, -bound, bound);
    net.weights.push_back(std::move(W));
    net.biases.push_back(Eigen::VectorXd::Zero(widths[l]));
    fan_in = widths[l];
  }
  return net;
}

MlpGradient mlp_loss_gradient(const MlpNetwork& net, const Matrix& X, const Labels& y, const Weights& w) {
  const auto n = static_cast<std::size_t>(X.rows());
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const auto L = net.weights.size();
  std::vector<Eigen::MatrixXd> acts(L + 1), deltas(L);
  acts[0] = batch_columns(X, rows);
  forward(net, acts);
  std::vector<double> targets(y.begin(), y.end());
  const Weights wn = w.empty() ? Weights(n, 1.0) : w;
  MlpGradient g;
  g.weights.resize(L);
  g.biases.resize(L);
  g.loss = backward(net, acts, targets, wn, deltas, g.weights, g.biases);
  return g;
}

double mlp_loss(const MlpNetwork& net, const Matrix& X, const Labels& y, const Weights& w) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    loss += (w.empty() ? 1.0 : w[k]) * logistic_loss(y[k], net.logit(row_of(X, i)));
  }
  return loss / static_cast<double>(X.rows());
}

MlpModel::MlpModel(MlpNetwork net) : net_(std::move(net)) {
  if (net_.weights.empty() || net_.weights.size() != net_.biases.size())
    throw std::invalid_argument("MlpModel: malformed layer list");
  for (std::size_t l = 0; l < net_.weights.size(); ++l) {
    if (net_.biases[l].size() != net_.weights[l].rows()) throw std::invalid_argument("MlpModel: bias size mismatch");
    if (l > 0 && net_.weights[l].cols() != net_.weights[l - 1].rows()) throw std::invalid_argument("MlpModel: layer shapes do not chain");
  }
  if (net_.weights.back().rows() != 1) throw std::invalid_argument("MlpModel: output layer must have width 1");
}

Prediction MlpModel::predict(std::span<const double> x) const {
  const double p = sigmoid(net_.logit(x));
  return {p > 0.5 ? 1 : 0, p};
}

nlohmann::ordered_json MlpModel::to_json() const {
  nlohmann::ordered_json j;
  j["type"] = "mlp";
  j["activation"] = to_string(net_.activation);
  auto& layers = j["layers"] = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < net_.weights.size(); ++l) {
    const auto& W = net_.weights[l];
    const auto& b = net_.biases[l];
    layers.push_back({{"rows", W.rows()},
                      {"cols", W.cols()},
                      {"weights_colmajor", std::vector<double>(W.data(), W.data() + W.size())},
                      {"bias", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  return j;
}

std::shared_ptr<const MlpModel> fit_mlp(const Matrix& X, const Labels& y, const Weights& w, const MlpParams& p) {
  if (!w.empty()) check_training_input(X, y, &w);
  else check_training_input(X, y);
  if (p.max_iterations < 0) throw UsageError("max_iterations must be >= 0");
  if (p.hidden_layers.empty()) throw UsageError("at least one hidden layer is required");
  if (!(p.learning_rate > 0.0)) throw UsageError("learning rate must be > 0");
  const auto n = y.size();
  const std::size_t batch = std::min<std::size_t>(p.batch_size > 0 ? static_cast<std::size_t>(p.batch_size) : 32, n);
  const Weights wn = normalize_to_mean_one(w, n);

  MlpNetwork net = init_network(static_cast<std::size_t>(X.cols()), p.hidden_layers, p.activation, p.seed);
  const auto L = net.weights.size();

  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<Eigen::MatrixXd> mW, vW, gW(L);
  std::vector<Eigen::VectorXd> mb, vb, gb(L);
  for (std::size_t l = 0; l < L; ++l) {
    mW.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    vW.push_back(mW.back());
    mb.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    vb.push_back(mb.back());
  }

  const Eigen::MatrixXd Xt = X.transpose();
  std::vector<Eigen::MatrixXd> acts(L + 1), deltas(L);
  std::vector<double> targets(batch), bw(batch);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(p.seed, "mlp-shuffle"));

  std::vector<double> epoch_losses;
  std::int64_t step = 0;
  for (int epoch = 0; epoch < p.max_iterations; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t B = std::min(batch, n - start);
      acts[0].resize(Xt.rows(), static_cast<Eigen::Index>(B));
      for (std::size_t c = 0; c < B; ++c) {
        const auto r = order[start + c];
        acts[0].col(static_cast<Eigen::Index>(c)) = Xt.col(static_cast<Eigen::Index>(r));
        targets[c] = static_cast<double>(y[r]);
        bw[c] = wn[r];
      }
      forward(net, acts);
      const double loss = backward(net, acts, std::span(targets).first(B), std::span(bw).first(B), deltas, gW, gb);
      epoch_loss += loss * static_cast<double>(B);

      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      const double lr = p.learning_rate * std::sqrt(c2) / c1;
      for (std::size_t l = 0; l < L; ++l) {
        mW[l] = beta1 * mW[l] + (1.0 - beta1) * gW[l];
        vW[l] = beta2 * vW[l] + (1.0 - beta2) * gW[l].cwiseAbs2();
        net.weights[l].array() -= lr * mW[l].array() / (vW[l].array().sqrt() + eps * std::sqrt(c2));
        mb[l] = beta1 * mb[l] + (1.0 - beta1) * gb[l];
        vb[l] = beta2 * vb[l] + (1.0 - beta2) * gb[l].cwiseAbs2();
        net.biases[l].array() -= lr * mb[l].array() / (vb[l].array().sqrt() + eps * std::sqrt(c2));
      }
    }
    epoch_losses.push_back(epoch_loss / static_cast<double>(n));
  }

  for (std::size_t l = 0; l < L; ++l)
    if (!net.weights[l].allFinite() || !net.biases[l].allFinite()) throw NumericError("fit_mlp: parameters diverged");
  auto model = std::make_shared<MlpModel>(std::move(net));
  model->epoch_losses = std::move(epoch_losses);
  return model;
}

}  // namespace revboost
