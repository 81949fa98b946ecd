#pragma once

#include <cmath>
#include <random>
#include <string>

#include "revboost/common.hpp"
#include "revboost/rng.hpp"

namespace fixtures {

using revboost::Labels;
using revboost::Matrix;

inline std::string data_path(const std::string& name) { return std::string(REVBOOST_DATA_DIR) + "/" + name; }

/// Gaussian blobs centred at -sep and +sep on every coordinate.
inline void blobs(std::size_t n, std::size_t d, double sep, std::uint64_t seed, Matrix& X, Labels& y) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  y.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    for (std::size_t j = 0; j < d; ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (y[i] ? sep : -sep) + noise(gen);
  }
}

/// Uniform features in [-1, 1] with random labels (both classes present).
inline void random_dataset(std::size_t n, std::size_t d, std::uint64_t seed, Matrix& X, Labels& y) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  y.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = u(gen);
    y[i] = static_cast<int>(gen() % 2);
  }
  y[0] = 0;
  y[n - 1] = 1;
}

/// Four XOR corners, nudged so that no two points share a coordinate.
inline void jittered_xor(Matrix& X, Labels& y) {
  X.resize(4, 2);
  X << 0.0, 0.1, 1.0, 1.1, 0.1, 1.0, 1.1, 0.0;
  y = {0, 0, 1, 1};
}

inline void exact_xor(Matrix& X, Labels& y) {
  X.resize(4, 2);
  X << 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0;
  y = {0, 0, 1, 1};
}

/// Relative difference with a 1e-6 floor on the scale, for entries near zero.
inline double rel_error(double a, double b) { return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)}); }

}  // namespace fixtures
