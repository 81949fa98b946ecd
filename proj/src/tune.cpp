#include "revboost/tune.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "revboost/corpus.hpp"
#include "revboost/csv.hpp"
#include "revboost/metrics.hpp"

namespace revboost {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

bool is_active(const ParamSpec& spec, const ParamSet& partial) {
  if (!spec.when) return true;
  const auto* v = partial.find(spec.when->param);
  if (!v) return false;
  return std::find(spec.when->values.begin(), spec.when->values.end(), *v) != spec.when->values.end();
}

/// Finite support of one distribution, or empty for continuous ones.
std::vector<ParamValue> finite_values(const Distribution& d) {
  std::vector<ParamValue> out;
  if (const auto* du = std::get_if<DiscreteUniform>(&d)) {
    for (auto v = du->lo; v < du->hi; ++v) out.emplace_back(v);
  } else if (const auto* c = std::get_if<Categorical>(&d)) {
    for (const auto& v : c->values) out.emplace_back(v);
  } else if (const auto* f = std::get_if<FiniteSet>(&d)) {
    for (auto v : f->values) out.emplace_back(v);
  }
  return out;
}

std::uint64_t cardinality(const Distribution& d) {
  if (const auto* du = std::get_if<DiscreteUniform>(&d)) return static_cast<std::uint64_t>(du->hi - du->lo);
  if (const auto* c = std::get_if<Categorical>(&d)) return c->values.size();
  if (const auto* f = std::get_if<FiniteSet>(&d)) return f->values.size();
  return 0;
}

bool has_dependents(const ParamSpace& space, std::size_t i) {
  for (std::size_t j = i + 1; j < space.params.size(); ++j)
    if (space.params[j].when && space.params[j].when->param == space.params[i].name) return true;
  return false;
}

std::uint64_t count_from(const ParamSpace& space, std::size_t i, ParamSet& partial) {
  if (i == space.params.size()) return 1;
  const auto& spec = space.params[i];
  if (!is_active(spec, partial)) {
    partial.set(spec.name, std::monostate{});
    return count_from(space, i + 1, partial);
  }
  if (!has_dependents(space, i)) {
    partial.set(spec.name, std::monostate{});
    return sat_mul(cardinality(spec.dist), count_from(space, i + 1, partial));
  }
  std::uint64_t total = 0;
  for (auto& v : finite_values(spec.dist)) {
    partial.set(spec.name, std::move(v));
    total = sat_add(total, count_from(space, i + 1, partial));
  }
  return total;
}

}  // namespace

void ParamSpace::validate() const {
  if (params.empty()) throw UsageError("empty hyperparameter space");
  std::set<std::string> seen;
  for (const auto& spec : params) {
    if (!seen.insert(spec.name).second) throw UsageError("duplicate hyperparameter '" + spec.name + "'");
    if (const auto* du = std::get_if<DiscreteUniform>(&spec.dist)) {
      if (!(du->lo < du->hi)) throw UsageError("'" + spec.name + "': discrete range needs lo < hi");
    } else if (const auto* cu = std::get_if<ContinuousUniform>(&spec.dist)) {
      if (!(cu->lo < cu->hi) || !std::isfinite(cu->lo) || !std::isfinite(cu->hi))
        throw UsageError("'" + spec.name + "': continuous range needs finite lo < hi");
    } else if (cardinality(spec.dist) == 0) {
      throw UsageError("'" + spec.name + "': empty value list");
    }
    if (spec.when) {
      if (!seen.count(spec.when->param) || spec.when->param == spec.name)
        throw UsageError("'" + spec.name + "': condition must refer to an earlier hyperparameter");
      if (spec.when->values.empty()) throw UsageError("'" + spec.name + "': empty condition");
    }
  }
}

ParamSet ParamSpace::sample(Rng& rng) const {
  ParamSet out;
  out.values.reserve(params.size());
  for (const auto& spec : params) {
    if (!is_active(spec, out)) {
      out.values.emplace_back(spec.name, std::monostate{});
      continue;
    }
    ParamValue v = std::visit(
        [&](const auto& d) -> ParamValue {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, DiscreteUniform>)
            return d.lo + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(d.hi - d.lo)));
          else if constexpr (std::is_same_v<D, ContinuousUniform>)
            return uniform_real(rng, d.lo, d.hi);
          else
            return d.values[uniform_index(rng, d.values.size())];
        },
        spec.dist);
    out.values.emplace_back(spec.name, std::move(v));
  }
  return out;
}

bool ParamSpace::contains(const ParamSet& p) const {
  if (p.values.size() != params.size()) return false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& spec = params[i];
    const auto& [name, v] = p.values[i];
    if (name != spec.name) return false;
    if (!is_active(spec, p)) {
      if (!std::holds_alternative<std::monostate>(v)) return false;
      continue;
    }
    if (const auto* cu = std::get_if<ContinuousUniform>(&spec.dist)) {
      const auto* d = std::get_if<double>(&v);
      if (!d || !(*d >= cu->lo && *d < cu->hi)) return false;
    } else {
      const auto support = finite_values(spec.dist);
      if (std::find(support.begin(), support.end(), v) == support.end()) return false;
    }
  }
  return true;
}

std::optional<std::uint64_t> ParamSpace::support_size() const {
  for (const auto& spec : params)
    if (std::holds_alternative<ContinuousUniform>(spec.dist)) return std::nullopt;
  ParamSet partial;
  return count_from(*this, 0, partial);
}

std::vector<std::string> ParamSpace::names() const {
  std::vector<std::string> out;
  for (const auto& spec : params) out.push_back(spec.name);
  return out;
}

const ParamSpec* ParamSpace::find(std::string_view name) const {
  for (const auto& spec : params)
    if (spec.name == name) return &spec;
  return nullptr;
}

ParamSpace default_space(ClassifierKind kind) {
  const Categorical criterion{{"gini", "entropy"}};
  const DiscreteUniform depth{3, 5};
  ParamSpace s;
  switch (kind) {
    case ClassifierKind::tree:
      s.params = {{"criterion", criterion, {}}, {"max_depth", depth, {}}, {"splitter", Categorical{{"best", "random"}}, {}}};
      break;
    case ClassifierKind::forest:
      s.params = {{"criterion", criterion, {}}, {"max_depth", depth, {}}, {"n_estimators", DiscreteUniform{100, 1000}, {}}};
      break;
    case ClassifierKind::svm:
      s.params = {{"kernel", Categorical{{"rbf", "linear", "polynomial", "sigmoid"}}, {}},
                  {"C", ContinuousUniform{0.1, 1000.0}, {}},
                  {"degree", DiscreteUniform{3, 10}, Condition{"kernel", {std::string("polynomial")}}},
                  {"gamma", Categorical{{"scale", "auto"}}, Condition{"kernel", {std::string("rbf")}}}};
      break;
    case ClassifierKind::gbt:
      s.params = {{"n_estimators", DiscreteUniform{100, 1000}, {}},
                  {"max_depth", depth, {}},
                  {"gamma", ContinuousUniform{0.0, 10.0}, {}},
                  {"learning_rate", ContinuousUniform{0.01, 1.0}, {}}};
      break;
    case ClassifierKind::mlp: {
      const FiniteSet units{{5, 10, 15, 20, 25, 30, 35, 40, 45, 50}};
      s.params = {{"max_iterations", FiniteSet{{600, 800, 1000, 1200}}, {}},
                  {"n_layers", DiscreteUniform{2, 5}, {}},
                  {"units_1", units, {}},
                  {"units_2", units, {}},
                  {"units_3", units, Condition{"n_layers", {std::int64_t{3}, std::int64_t{4}}}},
                  {"units_4", units, Condition{"n_layers", {std::int64_t{4}}}},
                  {"activation", Categorical{{"relu", "tanh", "logistic", "identity"}}, {}}};
      break;
    }
  }
  s.validate();
  return s;
}

void apply_space_overrides(ParamSpace& space, const nlohmann::json& overrides) {
  if (!overrides.is_object()) throw UsageError("space overrides must be a JSON object");
  for (const auto& [name, o] : overrides.items()) {
    auto it = std::find_if(space.params.begin(), space.params.end(), [&](const ParamSpec& s) { return s.name == name; });
    if (it == space.params.end()) throw UsageError("override for unknown hyperparameter '" + name + "'");
    if (!o.is_object()) throw UsageError("override for '" + name + "' must be an object");
    try {
      if (auto* du = std::get_if<DiscreteUniform>(&it->dist)) {
        du->lo = o.value("lo", du->lo);
        du->hi = o.value("hi", du->hi);
      } else if (auto* cu = std::get_if<ContinuousUniform>(&it->dist)) {
        cu->lo = o.value("lo", cu->lo);
        cu->hi = o.value("hi", cu->hi);
      } else if (auto* c = std::get_if<Categorical>(&it->dist)) {
        if (o.contains("values")) c->values = o.at("values").get<std::vector<std::string>>();
      } else if (auto* f = std::get_if<FiniteSet>(&it->dist)) {
        if (o.contains("values")) f->values = o.at("values").get<std::vector<std::int64_t>>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("override for '" + name + "': " + e.what());
    }
  }
  space.validate();
}

Folds kfold_indices(std::size_t n, std::size_t K, std::span<const int> labels, std::uint64_t seed) {
  if (K < 2 || K > n) throw UsageError("fold count must be in [2, n]; got K=" + std::to_string(K) + ", n=" + std::to_string(n));
  if (labels.size() != n) throw std::invalid_argument("kfold_indices: label count differs from n");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(i);

  Folds out;
  for (const auto& c : by_class)
    if (!c.empty() && c.size() < K) out.stratified = false;

  Rng rng(derive_seed(seed, "folds"));
  std::vector<std::size_t> order;
  if (out.stratified) {
    for (auto& c : by_class) {
      shuffle(c, rng);
      order.insert(order.end(), c.begin(), c.end());
    }
  } else {
    order.resize(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle(order, rng);
  }
  out.folds.resize(K);
  for (std::size_t p = 0; p < n; ++p) out.folds[p % K].push_back(order[p]);
  for (auto& f : out.folds) std::sort(f.begin(), f.end());
  return out;
}

std::pair<double, double> mean_std(std::span<const double> v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

CvScore cross_validate(const Matrix& X, const Labels& y, const Folds& folds, const FitFn& fit, std::uint64_t seed) {
  check_training_input(X, y);
  const auto n = y.size();
  CvScore cv;
  std::vector<char> held(n);
  for (const auto& fold : folds.folds) {
    if (fold.empty()) throw std::invalid_argument("cross_validate: empty fold");
    std::fill(held.begin(), held.end(), 0);
    for (auto i : fold) held.at(i) = 1;
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < n; ++i)
      if (!held[i]) train.push_back(i);
    if (train.empty()) throw std::invalid_argument("cross_validate: fold covers all samples");
    const auto model = fit(take_rows(X, train), take(y, train), seed);
    const auto pred = model->predict_labels(take_rows(X, fold));
    const auto s = scores(confusion(take(y, fold), pred));
    cv.fold_accuracy.push_back(s.accuracy);
    cv.fold_f1.push_back(s.f1);
  }
  std::tie(cv.mean_accuracy, cv.std_accuracy) = mean_std(cv.fold_accuracy);
  std::tie(cv.mean_f1, cv.std_f1) = mean_std(cv.fold_f1);
  return cv;
}

CvScore cross_validate(const Matrix& X, const Labels& y, ClassifierKind kind, const ParamSet& h, std::size_t K,
                       std::uint64_t seed) {
  const auto folds = kfold_indices(y.size(), K, y, seed);
  return cross_validate(X, y, folds,
                        [&](const Matrix& Xf, const Labels& yf, std::uint64_t s) {
                          return fit_classifier(kind, h, Xf, yf, {}, s);
                        },
                        seed);
}

std::uint64_t model_seed(std::uint64_t seed, ClassifierKind kind) { return derive_seed(seed, "model:" + to_string(kind)); }

bool ranks_before(const LedgerEntry& a, const LedgerEntry& b) {
  if (a.cv.mean_accuracy != b.cv.mean_accuracy) return a.cv.mean_accuracy > b.cv.mean_accuracy;
  if (a.cv.mean_f1 != b.cv.mean_f1) return a.cv.mean_f1 > b.cv.mean_f1;
  return a.index < b.index;
}

SearchResult randomized_search(Dataset train, Dataset test, ClassifierKind kind, const ParamSpace& space,
                               const SearchConfig& cfg) {
  space.validate();
  check_training_input(train.X, train.y);
  if (cfg.iterations < 1) throw UsageError("iterations must be >= 1");
  if (cfg.folds < 2) throw UsageError("folds must be >= 2");

  SearchResult r;
  r.kind = kind;
  r.param_names = space.names();

  const auto support = space.support_size();
  std::size_t target = static_cast<std::size_t>(cfg.iterations);
  if (support && *support < target) target = static_cast<std::size_t>(*support);

  // Rejection sampling; the draw cap guards spaces whose support is tiny
  // but not detectable as finite.
  Rng rng(derive_seed(cfg.seed, "search"));
  std::set<std::string> seen;
  const std::size_t max_draws = 1000 * static_cast<std::size_t>(cfg.iterations) + 1000;
  for (std::size_t draws = 0; r.ledger.size() < target && draws < max_draws; ++draws) {
    auto p = space.sample(rng);
    if (!seen.insert(to_json(p).dump()).second) continue;
    LedgerEntry e;
    e.index = r.ledger.size();
    e.params = std::move(p);
    r.ledger.push_back(std::move(e));
  }
  r.exhausted = support && r.ledger.size() == *support;

  const auto folds = kfold_indices(train.y.size(), static_cast<std::size_t>(cfg.folds), train.y, derive_seed(cfg.seed, "cv"));
  r.stratified = folds.stratified;
  parallel_for(r.ledger.size(), cfg.threads, [&](std::size_t i) {
    auto& e = r.ledger[i];
    e.cv = cross_validate(train.X, train.y, folds,
                          [&](const Matrix& Xf, const Labels& yf, std::uint64_t s) {
                            return fit_classifier(kind, e.params, Xf, yf, {}, s);
                          },
                          derive_seed(cfg.seed, "candidate", i));
  });

  r.best_index = 0;
  for (std::size_t i = 1; i < r.ledger.size(); ++i)
    if (ranks_before(r.ledger[i], r.ledger[r.best_index])) r.best_index = i;
  r.best_params = r.ledger[r.best_index].params;
  r.model_seed = model_seed(cfg.seed, kind);
  r.best_model = fit_classifier(kind, r.best_params, train.X, train.y, {}, r.model_seed);
  r.test = std::move(test);
  return r;
}

SearchResult randomized_search(const Dataset& data, double test_fraction, ClassifierKind kind,
                               const ParamSpace& space, const SearchConfig& cfg) {
  if (data.ids.size() != data.y.size()) throw std::invalid_argument("randomized_search: ids and labels differ in length");
  const auto m = split_dataset(data.ids, data.y, test_fraction, cfg.seed);
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < data.ids.size(); ++i) pos[data.ids[i]] = i;
  auto side = [&](const std::vector<std::string>& ids) {
    std::vector<std::size_t> idx;
    for (const auto& id : ids) idx.push_back(pos.at(id));
    return Dataset{take_rows(data.X, idx), take(data.y, idx), ids};
  };
  return randomized_search(side(m.train_ids), side(m.test_ids), kind, space, cfg);
}

std::vector<LedgerEntry> report_top(const SearchResult& result, std::size_t k) {
  auto rows = result.ledger;
  std::sort(rows.begin(), rows.end(), ranks_before);
  if (rows.size() > k) rows.resize(k);
  return rows;
}

namespace {

std::vector<std::string> score_fields(const CvScore& cv) {
  return {format_fixed(cv.mean_accuracy, 6), format_fixed(cv.std_accuracy, 6), format_fixed(cv.mean_f1, 6),
          format_fixed(cv.std_f1, 6)};
}

const std::vector<std::string> kScoreColumns = {"mean_acc", "std_acc", "mean_f1", "std_f1"};

std::string param_field(const ParamSet& p, const std::string& name) {
  const auto* v = p.find(name);
  return v ? to_string(*v) : "--";
}

}  // namespace

void write_ledger_csv(std::ostream& out, const std::vector<std::string>& names, const std::vector<LedgerEntry>& ledger) {
  std::vector<std::string> header{"index"};
  header.insert(header.end(), names.begin(), names.end());
  header.insert(header.end(), kScoreColumns.begin(), kScoreColumns.end());
  csv::write_row(out, header);
  for (const auto& e : ledger) {
    std::vector<std::string> row{std::to_string(e.index)};
    for (const auto& n : names) row.push_back(param_field(e.params, n));
    const auto s = score_fields(e.cv);
    row.insert(row.end(), s.begin(), s.end());
    csv::write_row(out, row);
  }
}

void write_top_csv(std::ostream& out, const std::vector<std::string>& names, const std::vector<LedgerEntry>& rows) {
  std::vector<std::string> header = names;
  header.insert(header.end(), kScoreColumns.begin(), kScoreColumns.end());
  csv::write_row(out, header);
  for (const auto& e : rows) {
    std::vector<std::string> row;
    for (const auto& n : names) row.push_back(param_field(e.params, n));
    const auto s = score_fields(e.cv);
    row.insert(row.end(), s.begin(), s.end());
    csv::write_row(out, row);
  }
}

void write_top_text(std::ostream& out, const std::string& title, const std::vector<std::string>& names,
                    const std::vector<LedgerEntry>& rows) {
  std::vector<std::string> header = names;
  header.insert(header.end(), {"Mean Acc.", "Std Acc.", "Mean F1", "Std F1"});
  std::vector<std::vector<std::string>> cells;
  for (const auto& e : rows) {
    std::vector<std::string> row;
    for (const auto& n : names) {
      const auto* v = e.params.find(n);
      row.push_back(v && std::holds_alternative<double>(*v) ? format_fixed(std::get<double>(*v), 3) : param_field(e.params, n));
    }
    for (double x : {e.cv.mean_accuracy, e.cv.std_accuracy, e.cv.mean_f1, e.cv.std_f1}) row.push_back(format_fixed(x, 3));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  out << title << '\n';
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
    }
    out << '\n';
  };
  line(header);
  for (const auto& row : cells) line(row);
}

}  // namespace revboost
