#include "revboost/common.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "revboost/rng.hpp"

namespace revboost {

Matrix take_rows(const Matrix& X, std::span<const std::size_t> idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(idx[r]));
  return out;
}

void check_training_input(const Matrix& X, const Labels& y, const Weights* w) {
  if (X.rows() == 0) throw std::invalid_argument("empty training set");
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw std::invalid_argument("dimension mismatch: " + std::to_string(X.rows()) + " rows but " +
                                std::to_string(y.size()) + " labels");
  for (int label : y)
    if (label != 0 && label != 1) throw std::invalid_argument("labels must be 0 or 1");
  if (!X.allFinite()) throw NumericError("training matrix contains non-finite values");
  if (w) {
    if (w->size() != y.size())
      throw std::invalid_argument("dimension mismatch: " + std::to_string(w->size()) + " weights for " +
                                  std::to_string(y.size()) + " samples");
    double total = 0.0;
    for (double v : *w) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("sample weights must be finite and non-negative");
      total += v;
    }
    if (total <= 0.0) throw std::invalid_argument("sample weights are all zero");
  }
}

Weights normalize_to_mean_one(const Weights& w, std::size_t n) {
  if (w.empty()) return Weights(n, 1.0);
  if (std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); })) return Weights(w.size(), 1.0);
  double total = 0.0;
  for (double v : w) total += v;
  Weights out(w.size());
  const double scale = static_cast<double>(w.size()) / total;
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] * scale;
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return {buf, res.ptr};
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  const auto count = std::min<std::size_t>(threads, n);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

// --- rng ---

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(seed ^ h) + index);
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over an empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = static_cast<std::size_t>(uniform_index(rng, n));
  return idx;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw std::invalid_argument("cannot sample more items than the population holds");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace revboost
