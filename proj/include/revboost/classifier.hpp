#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "revboost/common.hpp"

namespace revboost {

enum class ClassifierKind { tree, forest, gbt, svm, mlp };

inline constexpr ClassifierKind kAllKinds[] = {ClassifierKind::tree, ClassifierKind::forest, ClassifierKind::gbt,
                                               ClassifierKind::svm, ClassifierKind::mlp};

std::string to_string(ClassifierKind k);
ClassifierKind parse_kind(std::string_view s);
std::string display_name(ClassifierKind k);
/// Whether fit honours per-sample weights (required by AdaBoost).
bool accepts_sample_weights(ClassifierKind k);

/// Any trained model behind one predict interface.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Prediction predict(std::span<const double> x) const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual nlohmann::ordered_json to_json() const = 0;

  Labels predict_labels(const Matrix& X) const;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

void check_input_dim(std::size_t expected, std::size_t got);

/// A sampled hyperparameter value. monostate marks a conditionally inactive
/// parameter.
using ParamValue = std::variant<std::monostate, std::int64_t, double, std::string>;

std::string to_string(const ParamValue& v);
nlohmann::ordered_json to_json(const ParamValue& v);
ParamValue param_from_json(const nlohmann::json& j);

/// One hyperparameter assignment, in the order its space declares them.
struct ParamSet {
  std::vector<std::pair<std::string, ParamValue>> values;

  const ParamValue* find(std::string_view name) const;
  std::int64_t get_int(std::string_view name) const;
  double get_real(std::string_view name) const;
  std::string get_string(std::string_view name) const;
  void set(std::string name, ParamValue v);

  bool operator==(const ParamSet&) const = default;
};

nlohmann::ordered_json to_json(const ParamSet& p);
ParamSet params_from_json(const nlohmann::json& j);

/// Fits `kind` configured by `params`. Empty `w` means uniform weights.
ClassifierPtr fit_classifier(ClassifierKind kind, const ParamSet& params, const Matrix& X, const Labels& y,
                             const Weights& w, std::uint64_t seed);

}  // namespace revboost
