#include "revboost/meta.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "revboost/csv.hpp"
#include "revboost/metrics.hpp"
#include "revboost/rng.hpp"

namespace revboost {

std::string to_string(EnsembleMethod m) { return m == EnsembleMethod::bagging ? "bagging" : "adaboost"; }

EnsembleMethod parse_method(std::string_view s) {
  if (s == "bagging") return EnsembleMethod::bagging;
  if (s == "adaboost") return EnsembleMethod::adaboost;
  throw UsageError("unknown ensemble method '" + std::string(s) + "'");
}

EnsembleModel::EnsembleModel(EnsembleMethod method, std::vector<ClassifierPtr> members, std::vector<double> alphas)
    : method_(method), members_(std::move(members)), alphas_(std::move(alphas)) {
  if (members_.empty()) throw std::invalid_argument("EnsembleModel: no members");
  if (members_.size() != alphas_.size()) throw std::invalid_argument("EnsembleModel: one weight per member required");
  for (double a : alphas_)
    if (!std::isfinite(a)) throw NumericError("EnsembleModel: non-finite member weight");
}

Prediction EnsembleModel::predict(std::span<const double> x) const {
  double votes[2] = {0.0, 0.0};
  double total = 0.0;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    votes[members_[m]->predict(x).label] += alphas_[m];
    total += alphas_[m];
  }
  const int label = votes[1] > votes[0] ? 1 : 0;
  return {label, total > 0.0 ? (votes[1] - votes[0]) / total : 0.0};
}

nlohmann::ordered_json EnsembleModel::to_json() const {
  nlohmann::ordered_json j;
  j["type"] = "ensemble";
  j["method"] = to_string(method_);
  j["alphas"] = alphas_;
  j["round_errors"] = round_errors;
  auto& arr = j["members"] = nlohmann::ordered_json::array();
  for (const auto& m : members_) arr.push_back(m->to_json());
  return j;
}

EnsembleModel EnsembleModel::prefix(std::size_t k) const {
  k = std::min(std::max<std::size_t>(k, 1), members_.size());
  EnsembleModel out(method_, {members_.begin(), members_.begin() + static_cast<std::ptrdiff_t>(k)},
                    {alphas_.begin(), alphas_.begin() + static_cast<std::ptrdiff_t>(k)});
  out.round_errors.assign(round_errors.begin(), round_errors.begin() + static_cast<std::ptrdiff_t>(std::min(k, round_errors.size())));
  return out;
}

double samme_alpha(double err, double learning_rate) { return learning_rate * std::log((1.0 - err) / err); }

std::uint64_t adaboost_round_seed(std::uint64_t base_seed, std::size_t round) {
  // Round 0 is the stand-alone base fit: uniform weights and the same seed.
  return round == 0 ? base_seed : derive_seed(base_seed, "adaboost-round", round);
}

std::uint64_t bagging_member_seed(std::uint64_t base_seed, std::size_t member) {
  return derive_seed(base_seed, "bagging-member", member);
}

std::shared_ptr<const EnsembleModel> fit_bagging(const Matrix& X, const Labels& y, const EnsembleParams& p) {
  check_training_input(X, y);
  if (p.n_estimators < 1) throw UsageError("n_estimators must be >= 1");
  const auto n = y.size();
  std::vector<ClassifierPtr> members(static_cast<std::size_t>(p.n_estimators));
  parallel_for(members.size(), p.threads, [&](std::size_t m) {
    if (!p.resample) {
      members[m] = fit_classifier(p.base.kind, p.base.params, X, y, {}, bagging_member_seed(p.base.seed, m));
      return;
    }
    Rng rng(derive_seed(p.seed, "bagging-resample", m));
    const auto idx = bootstrap_indices(n, rng);
    const Matrix Xb = take_rows(X, idx);
    const Labels yb = take(y, idx);
    members[m] = fit_classifier(p.base.kind, p.base.params, Xb, yb, {}, bagging_member_seed(p.base.seed, m));
  });
  return std::make_shared<const EnsembleModel>(EnsembleMethod::bagging, std::move(members),
                                               std::vector<double>(members.size(), 1.0));
}

std::shared_ptr<const EnsembleModel> fit_adaboost(const Matrix& X, const Labels& y, const EnsembleParams& p,
                                                  const BoostObserver& observer) {
  check_training_input(X, y);
  if (p.n_estimators < 1) throw UsageError("n_estimators must be >= 1");
  if (!(p.adaboost_learning_rate > 0.0)) throw UsageError("adaboost learning rate must be > 0");
  if (!accepts_sample_weights(p.base.kind))
    throw UsageError(display_name(p.base.kind) + " does not accept sample weights and cannot be boosted");
  const auto n = y.size();
  Weights w(n, 1.0 / static_cast<double>(n));
  Weights scaled(n);

  std::vector<ClassifierPtr> members;
  std::vector<double> alphas, errors;
  for (std::size_t round = 0; round < static_cast<std::size_t>(p.n_estimators); ++round) {
    if (observer) observer(round, w);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = w[i] * static_cast<double>(n);
    if (round == 0) std::fill(scaled.begin(), scaled.end(), 1.0);
    auto member = fit_classifier(p.base.kind, p.base.params, X, y, scaled, adaboost_round_seed(p.base.seed, round));

    const Labels pred = member->predict_labels(X);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (pred[i] != y[i]) err += w[i];

    if (err >= 0.5 - kChanceSlack) {
      if (round == 0) {
        members.push_back(std::move(member));
        alphas.push_back(kNoSkillAlpha);
        errors.push_back(err);
      }
      break;
    }
    if (err <= 0.0) {
      members.push_back(std::move(member));
      alphas.push_back(samme_alpha(kZeroErrorClamp, p.adaboost_learning_rate));
      errors.push_back(err);
      break;
    }
    const double alpha = samme_alpha(err, p.adaboost_learning_rate);
    members.push_back(std::move(member));
    alphas.push_back(alpha);
    errors.push_back(err);

    const double boost = std::exp(alpha);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pred[i] != y[i]) w[i] *= boost;
      total += w[i];
    }
    for (auto& v : w) v /= total;
  }
  auto model = std::make_shared<EnsembleModel>(EnsembleMethod::adaboost, std::move(members), std::move(alphas));
  model->round_errors = std::move(errors);
  return model;
}

std::shared_ptr<const EnsembleModel> fit_ensemble(const Matrix& X, const Labels& y, const EnsembleParams& p) {
  return p.method == EnsembleMethod::bagging ? fit_bagging(X, y, p) : fit_adaboost(X, y, p);
}

std::vector<int> default_estimator_grid() {
  std::vector<int> grid;
  for (int n = 2; n <= 22; n += 2) grid.push_back(n);
  return grid;
}

std::vector<SweepRow> sweep(const Matrix& X_train, const Labels& y_train, const Matrix& X_test, const Labels& y_test,
                            EnsembleParams p, const std::vector<int>& estimator_counts) {
  if (estimator_counts.empty()) throw UsageError("sweep: empty estimator list");
  for (int n : estimator_counts)
    if (n < 1) throw UsageError("sweep: estimator counts must be >= 1");
  p.n_estimators = *std::max_element(estimator_counts.begin(), estimator_counts.end());
  const auto full = fit_ensemble(X_train, y_train, p);

  std::vector<SweepRow> rows;
  for (int n : estimator_counts) {
    const auto model = full->prefix(static_cast<std::size_t>(n));
    rows.push_back({n, error_rate(y_train, model.predict_labels(X_train)), error_rate(y_test, model.predict_labels(X_test))});
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  csv::write_row(out, {"n_estimators", "train_error", "test_error"});
  for (const auto& r : rows)
    csv::write_row(out, {std::to_string(r.n_estimators), format_fixed(r.train_error, 6), format_fixed(r.test_error, 6)});
}

}  // namespace revboost
