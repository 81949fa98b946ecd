#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "revboost/classifier.hpp"

namespace revboost {

enum class EnsembleMethod { bagging, adaboost };

std::string to_string(EnsembleMethod m);
EnsembleMethod parse_method(std::string_view s);

/// A base classifier configuration and the seed its stand-alone fit uses.
struct BaseLearner {
  ClassifierKind kind = ClassifierKind::tree;
  ParamSet params;
  std::uint64_t seed = 0;
};

struct EnsembleParams {
  EnsembleMethod method = EnsembleMethod::bagging;
  int n_estimators = 10;
  BaseLearner base;
  double adaboost_learning_rate = 1.0;
  std::uint64_t seed = 0;
  bool resample = true;  // bagging only; disabling is a test hook
  unsigned threads = 1;
};

/// Weighted vote over fitted members (bagging: all weights 1).
class EnsembleModel final : public Classifier {
 public:
  EnsembleModel(EnsembleMethod method, std::vector<ClassifierPtr> members, std::vector<double> alphas);

  /// label = argmax_k sum_m alpha_m [h_m(x) = k], ties to 0; score is the
  /// signed vote margin normalised by the total weight.
  Prediction predict(std::span<const double> x) const override;
  std::size_t input_dim() const override { return members_.front()->input_dim(); }
  nlohmann::ordered_json to_json() const override;

  EnsembleMethod method() const { return method_; }
  const std::vector<ClassifierPtr>& members() const { return members_; }
  const std::vector<double>& alphas() const { return alphas_; }
  std::size_t size() const { return members_.size(); }
  /// First k members with their weights.
  EnsembleModel prefix(std::size_t k) const;

  /// Weighted training error of each kept boosting round.
  std::vector<double> round_errors;

 private:
  EnsembleMethod method_;
  std::vector<ClassifierPtr> members_;
  std::vector<double> alphas_;
};

/// SAMME member weight for two classes: lr * ln((1 - err) / err).
double samme_alpha(double err, double learning_rate);

inline constexpr double kZeroErrorClamp = 1e-10;
/// Weight given to a lone first round whose error is already >= 0.5.
inline constexpr double kNoSkillAlpha = 1e-10;
/// Rounding slack below 0.5 still counted as chance level (15 x 1/30 sums to
/// just under one half).
inline constexpr double kChanceSlack = 1e-12;

std::uint64_t adaboost_round_seed(std::uint64_t base_seed, std::size_t round);
std::uint64_t bagging_member_seed(std::uint64_t base_seed, std::size_t member);

std::shared_ptr<const EnsembleModel> fit_bagging(const Matrix& X, const Labels& y, const EnsembleParams& p);

/// Called with the sample weights (summing to 1) at the start of each round.
using BoostObserver = std::function<void(std::size_t round, const Weights& w)>;

std::shared_ptr<const EnsembleModel> fit_adaboost(const Matrix& X, const Labels& y, const EnsembleParams& p,
                                                  const BoostObserver& observer = {});

std::shared_ptr<const EnsembleModel> fit_ensemble(const Matrix& X, const Labels& y, const EnsembleParams& p);

struct SweepRow {
  int n_estimators = 0;
  double train_error = 0.0;
  double test_error = 0.0;
};

/// Estimator counts 2, 4, ..., 22.
std::vector<int> default_estimator_grid();

/// Train/test error per estimator count. Members depend only on their index,
/// so one fit at the largest count is evaluated prefix by prefix.
std::vector<SweepRow> sweep(const Matrix& X_train, const Labels& y_train, const Matrix& X_test, const Labels& y_test,
                            EnsembleParams p, const std::vector<int>& estimator_counts);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace revboost
