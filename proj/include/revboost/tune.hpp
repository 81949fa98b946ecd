#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "revboost/classifier.hpp"
#include "revboost/rng.hpp"

namespace revboost {

/// Integers in [lo, hi).
struct DiscreteUniform {
  std::int64_t lo = 0;
  std::int64_t hi = 1;
};

/// Reals in [lo, hi).
struct ContinuousUniform {
  double lo = 0.0;
  double hi = 1.0;
};

/// Equiprobable named options.
struct Categorical {
  std::vector<std::string> values;
};

/// Equiprobable numeric values.
struct FiniteSet {
  std::vector<std::int64_t> values;
};

using Distribution = std::variant<DiscreteUniform, ContinuousUniform, Categorical, FiniteSet>;

/// The parameter is active only when an earlier parameter takes one of `values`.
struct Condition {
  std::string param;
  std::vector<ParamValue> values;
};

struct ParamSpec {
  std::string name;
  Distribution dist;
  std::optional<Condition> when;
};

struct ParamSpace {
  std::vector<ParamSpec> params;

  void validate() const;
  /// Inactive parameters come out as monostate and consume no draws.
  ParamSet sample(Rng& rng) const;
  bool contains(const ParamSet& p) const;
  /// Number of distinct canonical ParamSets, or nullopt when some dimension
  /// is continuous.
  std::optional<std::uint64_t> support_size() const;
  std::vector<std::string> names() const;
  const ParamSpec* find(std::string_view name) const;
};

ParamSpace default_space(ClassifierKind kind);

/// Applies `{"name": {"lo": .., "hi": ..} | {"values": [..]}}` overrides.
void apply_space_overrides(ParamSpace& space, const nlohmann::json& overrides);

struct Folds {
  std::vector<std::vector<std::size_t>> folds;  // each sorted ascending
  bool stratified = true;
};

/// K disjoint folds covering 0..n-1 with sizes differing by at most one.
/// Stratified by label unless some class has fewer than K members.
Folds kfold_indices(std::size_t n, std::size_t K, std::span<const int> labels, std::uint64_t seed);

struct CvScore {
  std::vector<double> fold_accuracy;
  std::vector<double> fold_f1;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
};

/// Mean and population standard deviation.
std::pair<double, double> mean_std(std::span<const double> v);

using FitFn = std::function<ClassifierPtr(const Matrix& X, const Labels& y, std::uint64_t seed)>;

CvScore cross_validate(const Matrix& X, const Labels& y, const Folds& folds, const FitFn& fit, std::uint64_t seed);
CvScore cross_validate(const Matrix& X, const Labels& y, ClassifierKind kind, const ParamSet& h, std::size_t K,
                       std::uint64_t seed);

struct Dataset {
  Matrix X;
  Labels y;
  std::vector<std::string> ids;
};

struct SearchConfig {
  int iterations = 100;
  int folds = 10;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct LedgerEntry {
  std::size_t index = 0;
  ParamSet params;
  CvScore cv;
};

struct SearchResult {
  ClassifierKind kind = ClassifierKind::tree;
  std::vector<std::string> param_names;
  ClassifierPtr best_model;
  ParamSet best_params;
  std::size_t best_index = 0;
  /// Seed of the refit; ensembles built on the best params reuse it.
  std::uint64_t model_seed = 0;
  Dataset test;
  std::vector<LedgerEntry> ledger;
  bool stratified = true;
  bool exhausted = false;
};

/// Seed used for every final fit of `kind` in a run with `seed`.
std::uint64_t model_seed(std::uint64_t seed, ClassifierKind kind);

/// Randomized search over `space` with K-fold CV on `train`. `test` is only
/// carried through to the result.
SearchResult randomized_search(Dataset train, Dataset test, ClassifierKind kind, const ParamSpace& space,
                               const SearchConfig& cfg);

/// Splits `data` stratified by label, then searches on the train side.
SearchResult randomized_search(const Dataset& data, double test_fraction, ClassifierKind kind,
                               const ParamSpace& space, const SearchConfig& cfg);

/// True when a ranks ahead of b: accuracy, then F1, then earlier sample.
bool ranks_before(const LedgerEntry& a, const LedgerEntry& b);

std::vector<LedgerEntry> report_top(const SearchResult& result, std::size_t k = 5);

void write_ledger_csv(std::ostream& out, const std::vector<std::string>& names, const std::vector<LedgerEntry>& ledger);
void write_top_csv(std::ostream& out, const std::vector<std::string>& names, const std::vector<LedgerEntry>& rows);
void write_top_text(std::ostream& out, const std::string& title, const std::vector<std::string>& names,
                    const std::vector<LedgerEntry>& rows);

}  // namespace revboost
