#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace revboost {

/// Feature matrix, one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Binary labels: 1 = fake (the positive class), 0 = real.
using Labels = std::vector<int>;
using Weights = std::vector<double>;

inline std::span<const double> row_of(const Matrix& X, Eigen::Index i) {
  return {X.data() + i * X.cols(), static_cast<std::size_t>(X.cols())};
}

/// Rows of X selected by idx, in idx order (duplicates allowed).
Matrix take_rows(const Matrix& X, std::span<const std::size_t> idx);

template <typename T>
std::vector<T> take(const std::vector<T>& v, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

struct Prediction {
  int label = 0;
  /// Class-1 probability for probabilistic models, signed margin otherwise.
  double score = 0.0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a numeric procedure that cannot proceed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or parameter values.
class UsageError : public Error {
 public:
  using Error::Error;
};

void check_training_input(const Matrix& X, const Labels& y, const Weights* w = nullptr);

/// Weights rescaled to mean 1; a constant vector maps to exact ones.
Weights normalize_to_mean_one(const Weights& w, std::size_t n);

/// Shortest decimal string that round-trips the double.
std::string format_double(double v);
/// Fixed-point with the given number of decimals.
std::string format_fixed(double v, int decimals);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
/// thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace revboost
