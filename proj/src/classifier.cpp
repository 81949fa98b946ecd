#include "revboost/classifier.hpp"

#include <algorithm>

#include "revboost/forest.hpp"
#include "revboost/gbt.hpp"
#include "revboost/mlp.hpp"
#include "revboost/svm.hpp"
#include "revboost/tree.hpp"

namespace revboost {

std::string to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::tree: return "tree";
    case ClassifierKind::forest: return "forest";
    case ClassifierKind::gbt: return "gbt";
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::mlp: return "mlp";
  }
  return "?";
}

ClassifierKind parse_kind(std::string_view s) {
  for (auto k : kAllKinds)
    if (to_string(k) == s) return k;
  throw UsageError("unknown classifier kind '" + std::string(s) + "' (expected tree, forest, gbt, svm or mlp)");
}

std::string display_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::tree: return "Decision Tree";
    case ClassifierKind::forest: return "Random Forest";
    case ClassifierKind::gbt: return "XGBT";
    case ClassifierKind::svm: return "SVM";
    case ClassifierKind::mlp: return "MLP";
  }
  return "?";
}

bool accepts_sample_weights(ClassifierKind k) {
  return k == ClassifierKind::tree || k == ClassifierKind::svm || k == ClassifierKind::mlp;
}

Labels Classifier::predict_labels(const Matrix& X) const {
  Labels out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[static_cast<std::size_t>(i)] = predict(row_of(X, i)).label;
  return out;
}

void check_input_dim(std::size_t expected, std::size_t got) {
  if (expected != got)
    throw std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) + " features, got " +
                                std::to_string(got));
}

std::string to_string(const ParamValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "--";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, double>) return format_double(x);
        else return x;
      },
      v);
}

nlohmann::ordered_json to_json(const ParamValue& v) {
  return std::visit(
      [](const auto& x) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
        else return x;
      },
      v);
}

ParamValue param_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw DataError("unsupported hyperparameter value " + j.dump());
}

const ParamValue* ParamSet::find(std::string_view name) const {
  for (const auto& [k, v] : values)
    if (k == name) return &v;
  return nullptr;
}

namespace {

const ParamValue& require(const ParamSet& p, std::string_view name) {
  const auto* v = p.find(name);
  if (!v || std::holds_alternative<std::monostate>(*v)) throw UsageError("missing hyperparameter '" + std::string(name) + "'");
  return *v;
}

}  // namespace

std::int64_t ParamSet::get_int(std::string_view name) const {
  const auto& v = require(*this, name);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw UsageError("hyperparameter '" + std::string(name) + "' must be an integer");
}

double ParamSet::get_real(std::string_view name) const {
  const auto& v = require(*this, name);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw UsageError("hyperparameter '" + std::string(name) + "' must be a number");
}

std::string ParamSet::get_string(std::string_view name) const {
  const auto& v = require(*this, name);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw UsageError("hyperparameter '" + std::string(name) + "' must be a string");
}

void ParamSet::set(std::string name, ParamValue v) {
  for (auto& [k, old] : values)
    if (k == name) {
      old = std::move(v);
      return;
    }
  values.emplace_back(std::move(name), std::move(v));
}

nlohmann::ordered_json to_json(const ParamSet& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : p.values) j[k] = to_json(v);
  return j;
}

ParamSet params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("hyperparameters must be a JSON object");
  ParamSet p;
  for (const auto& [k, v] : j.items()) p.values.emplace_back(k, param_from_json(v));
  return p;
}

namespace {

std::vector<int> mlp_hidden_layers(const ParamSet& p) {
  const auto layers = p.get_int("n_layers");
  std::vector<int> widths;
  for (std::int64_t l = 1; l <= layers; ++l) widths.push_back(static_cast<int>(p.get_int("units_" + std::to_string(l))));
  return widths;
}

bool uniform(const Weights& w) {
  return std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); });
}

}  // namespace

ClassifierPtr fit_classifier(ClassifierKind kind, const ParamSet& params, const Matrix& X, const Labels& y,
                             const Weights& w, std::uint64_t seed) {
  switch (kind) {
    case ClassifierKind::tree: {
      TreeParams tp;
      tp.max_depth = static_cast<int>(params.get_int("max_depth"));
      tp.splitter = parse_splitter(params.get_string("splitter"));
      tp.criterion = parse_criterion(params.get_string("criterion"));
      tp.seed = seed;
      return fit_tree(X, y, w, tp);
    }
    case ClassifierKind::forest: {
      if (!w.empty() && !uniform(w)) throw UsageError("random forest does not accept sample weights");
      ForestParams fp;
      fp.n_estimators = static_cast<int>(params.get_int("n_estimators"));
      fp.max_depth = static_cast<int>(params.get_int("max_depth"));
      fp.criterion = parse_criterion(params.get_string("criterion"));
      fp.seed = seed;
      return fit_forest(X, y, fp);
    }
    case ClassifierKind::gbt: {
      if (!w.empty() && !uniform(w)) throw UsageError("gradient-boosted trees do not accept sample weights");
      GbtParams gp;
      gp.n_estimators = static_cast<int>(params.get_int("n_estimators"));
      gp.max_depth = static_cast<int>(params.get_int("max_depth"));
      gp.gamma = params.get_real("gamma");
      gp.learning_rate = params.get_real("learning_rate");
      gp.seed = seed;
      return fit_gbt(X, y, gp);
    }
    case ClassifierKind::svm: {
      SvmParams sp;
      sp.kernel = parse_kernel(params.get_string("kernel"));
      sp.C = params.get_real("C");
      if (sp.kernel == KernelKind::polynomial) sp.degree = static_cast<int>(params.get_int("degree"));
      if (sp.kernel == KernelKind::rbf) sp.gamma_mode = parse_gamma_mode(params.get_string("gamma"));
      sp.seed = seed;
      return fit_svm(X, y, w, sp);
    }
    case ClassifierKind::mlp: {
      MlpParams mp;
      mp.max_iterations = static_cast<int>(params.get_int("max_iterations"));
      mp.hidden_layers = mlp_hidden_layers(params);
      mp.activation = parse_activation(params.get_string("activation"));
      mp.seed = seed;
      return fit_mlp(X, y, w, mp);
    }
  }
  throw UsageError("unknown classifier kind");
}

}  // namespace revboost
