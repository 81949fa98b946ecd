#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace revboost {

/// All stochastic components draw from this engine. The distributions below
/// are implemented locally so that a seed means the same stream on every
/// standard library.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Independent child seed for a named stream and index.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Unbiased integer in [0, n).
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

/// n draws with replacement from [0, n).
std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng);

/// k distinct values from [0, n), returned in ascending order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace revboost
