#include "revboost/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "revboost/csv.hpp"
#include "revboost/metrics.hpp"

namespace revboost {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace files {
std::string tune_top_csv(ClassifierKind k) { return "tune_" + to_string(k) + "_top5.csv"; }
std::string tune_top_text(ClassifierKind k) { return "tune_" + to_string(k) + "_top5.txt"; }
std::string tune_best(ClassifierKind k) { return "tune_" + to_string(k) + "_best.json"; }
std::string tune_ledger(ClassifierKind k) { return "tune_" + to_string(k) + "_ledger.csv"; }
std::string sweep_csv(EnsembleMethod m, ClassifierKind base) {
  return "sweep_" + to_string(m) + "_" + to_string(base) + ".csv";
}
}  // namespace files

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<csv::Record> read_csv_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return csv::read(in);
}

double parse_real(const std::string& s, const fs::path& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw DataError(where.string() + ": '" + s + "' is not a number");
}

void ensure_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw DataError("cannot create output directory " + cfg.out.string() + ": " + ec.message());
}

std::vector<TokenizedDoc> load_tokens(const fs::path& dir) {
  std::ifstream in(dir / files::kTokens, std::ios::binary);
  if (!in) throw DataError("cannot read " + (dir / files::kTokens).string() + " (run prep first)");
  return read_tokenized(in);
}

std::string format_error(double e) { return format_fixed(e, 6); }

}  // namespace

void RunConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw UsageError("test fraction must be in (0, 1)");
  if (folds < 2) throw UsageError("folds must be >= 2");
  if (iterations < 1) throw UsageError("iterations must be >= 1");
  if (threads < 1) throw UsageError("threads must be >= 1");
  if (kinds.empty()) throw UsageError("no classifier kinds selected");
  if (estimators.empty()) throw UsageError("empty estimator list");
  for (int n : estimators)
    if (n < 2 || n > 22 || n % 2 != 0) throw UsageError("estimator counts must be even and within [2, 22]");
  if (!(adaboost_learning_rate > 0.0)) throw UsageError("adaboost learning rate must be > 0");
  for (const auto& s : sweeps)
    if (s.method == EnsembleMethod::adaboost && !accepts_sample_weights(s.base))
      throw UsageError(display_name(s.base) + " cannot be boosted: it does not accept sample weights");
  embedding.validate();
}

void apply_config_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "corpus") cfg.corpus = v.get<std::string>();
      else if (key == "stopwords") cfg.stopwords = v.get<std::string>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "test_fraction") cfg.test_fraction = v.get<double>();
      else if (key == "folds") cfg.folds = v.get<int>();
      else if (key == "iterations") cfg.iterations = v.get<int>();
      else if (key == "threads") cfg.threads = v.get<unsigned>();
      else if (key == "embed_all") cfg.embed_all = v.get<bool>();
      else if (key == "reinfer_train") cfg.reinfer_train = v.get<bool>();
      else if (key == "estimators") cfg.estimators = v.get<std::vector<int>>();
      else if (key == "adaboost_learning_rate") cfg.adaboost_learning_rate = v.get<double>();
      else if (key == "space") cfg.space_overrides = v;
      else if (key == "kinds") {
        cfg.kinds.clear();
        for (const auto& k : v) cfg.kinds.push_back(parse_kind(k.get<std::string>()));
      } else if (key == "sweeps") {
        cfg.sweeps.clear();
        for (const auto& s : v)
          cfg.sweeps.push_back({parse_method(s.at("method").get<std::string>()), parse_kind(s.at("base").get<std::string>())});
      } else if (key == "embedding") {
        auto& e = cfg.embedding;
        for (const auto& [ek, ev] : v.items()) {
          if (ek == "dim") e.dim = ev.get<int>();
          else if (ek == "window") e.window = ev.get<int>();
          else if (ek == "epochs") e.epochs = ev.get<int>();
          else if (ek == "negative") e.negative = ev.get<int>();
          else if (ek == "lr_start") e.lr_start = ev.get<double>();
          else if (ek == "lr_end") e.lr_end = ev.get<double>();
          else if (ek == "min_count") e.min_count = ev.get<int>();
          else if (ek == "infer_steps") e.infer_steps = ev.get<int>();
          else throw UsageError("unknown embedding config key '" + ek + "'");
        }
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

RunData load_run_data(const fs::path& dir, bool with_test_labels) {
  RunData d;
  d.manifest = manifest_from_json(read_file(dir / files::kSplit));
  const auto docs = load_tokens(dir);
  std::ifstream vin(dir / files::kVectors, std::ios::binary);
  if (!vin) throw DataError("cannot read " + (dir / files::kVectors).string() + " (run embed first)");
  const auto vectors = read_vectors(vin);

  std::unordered_map<std::string, const DocVector*> by_id;
  for (const auto& v : vectors) by_id[v.id] = &v;
  std::unordered_map<std::string, int> label_of;
  for (const auto& doc : docs) label_of[doc.id] = static_cast<int>(doc.label);

  auto build = [&](const std::vector<std::string>& ids, bool labels) {
    Dataset s;
    s.ids = ids;
    if (ids.empty()) return s;
    const auto dim = by_id.empty() ? 0 : by_id.begin()->second->values.size();
    s.X.resize(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const auto it = by_id.find(ids[r]);
      if (it == by_id.end()) throw DataError("no vector for document '" + ids[r] + "'");
      for (std::size_t c = 0; c < dim; ++c) s.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = it->second->values[c];
      if (labels) {
        const auto lt = label_of.find(ids[r]);
        if (lt == label_of.end()) throw DataError("no label for document '" + ids[r] + "'");
        s.y.push_back(lt->second);
      }
    }
    return s;
  };
  d.train = build(d.manifest.train_ids, true);
  d.test = build(d.manifest.test_ids, with_test_labels);
  return d;
}

BestParams load_best(const fs::path& dir, ClassifierKind kind) {
  const auto path = dir / files::tune_best(kind);
  json j;
  try {
    j = json::parse(read_file(path));
    BestParams b;
    b.kind = parse_kind(j.at("kind").get<std::string>());
    if (b.kind != kind) throw DataError(path.string() + ": kind mismatch");
    b.params = params_from_json(j.at("params"));
    b.model_seed = j.at("model_seed").get<std::uint64_t>();
    // Restore the declared order so serialization is stable.
    ParamSet ordered;
    for (const auto& name : default_space(kind).names())
      if (const auto* v = b.params.find(name)) ordered.set(name, *v);
    for (const auto& [k, v] : b.params.values)
      if (!ordered.find(k)) ordered.set(k, v);
    b.params = std::move(ordered);
    return b;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<TokenizedDoc> cmd_prep(const RunConfig& cfg) {
  ensure_out(cfg);
  const auto corpus = load_corpus(cfg.corpus);
  const auto stop = load_stopwords(cfg.stopwords);
  std::vector<TokenizedDoc> docs;
  docs.reserve(corpus.size());
  for (const auto& r : corpus.reviews) docs.push_back(preprocess(r, stop));
  std::ostringstream out;
  write_tokenized(out, docs);
  write_file(cfg.out / files::kTokens, out.str());
  return docs;
}

EmbeddingModel cmd_embed(const RunConfig& cfg) {
  ensure_out(cfg);
  const auto docs = load_tokens(cfg.out);
  std::vector<std::string> ids;
  Labels labels;
  for (const auto& d : docs) {
    ids.push_back(d.id);
    labels.push_back(static_cast<int>(d.label));
  }
  const auto manifest = split_dataset(ids, labels, cfg.test_fraction, cfg.seed);
  write_file(cfg.out / files::kSplit, manifest_to_json(manifest));

  const std::set<std::string> train_ids(manifest.train_ids.begin(), manifest.train_ids.end());
  std::vector<TokenizedDoc> fit_docs;
  for (const auto& d : docs)
    if (cfg.embed_all || train_ids.count(d.id)) fit_docs.push_back(d);

  auto ecfg = cfg.embedding;
  ecfg.seed = derive_seed(cfg.seed, "embedding");
  const auto model = train_embedding(fit_docs, ecfg);

  std::unordered_map<std::string, std::size_t> trained_row;
  for (std::size_t i = 0; i < model.doc_ids.size(); ++i) trained_row[model.doc_ids[i]] = i;
  std::vector<DocVector> vectors;
  for (const auto& d : docs) {
    const bool use_trained = !cfg.reinfer_train && train_ids.count(d.id) && trained_row.count(d.id);
    if (use_trained) {
      vectors.push_back(trained_vector(model, trained_row.at(d.id)));
      continue;
    }
    const bool known = std::any_of(d.tokens.begin(), d.tokens.end(), [&](const auto& t) { return model.lookup(t) >= 0; });
    if (!known) std::cerr << "warning: document " << d.id << " has no in-vocabulary tokens; using its initial vector\n";
    vectors.push_back(infer_vector(model, d, known ? ecfg.infer_steps : 0));
  }
  std::ostringstream vout;
  write_vectors(vout, vectors);
  write_file(cfg.out / files::kVectors, vout.str());
  write_file(cfg.out / files::kEmbedding, embedding_to_json(model));
  return model;
}

SearchResult cmd_tune(const RunConfig& cfg, ClassifierKind kind) {
  ensure_out(cfg);
  auto data = load_run_data(cfg.out, false);
  auto space = default_space(kind);
  if (cfg.space_overrides.contains(to_string(kind))) apply_space_overrides(space, cfg.space_overrides.at(to_string(kind)));
  SearchConfig sc;
  sc.iterations = cfg.iterations;
  sc.folds = cfg.folds;
  sc.seed = cfg.seed;
  sc.threads = cfg.threads;
  auto result = randomized_search(std::move(data.train), std::move(data.test), kind, space, sc);

  const auto top = report_top(result, 5);
  std::ostringstream top_csv, top_txt, ledger;
  write_top_csv(top_csv, result.param_names, top);
  write_top_text(top_txt, "Best hyperparameters tuning (training stage): " + display_name(kind), result.param_names, top);
  write_ledger_csv(ledger, result.param_names, result.ledger);
  write_file(cfg.out / files::tune_top_csv(kind), top_csv.str());
  write_file(cfg.out / files::tune_top_text(kind), top_txt.str());
  write_file(cfg.out / files::tune_ledger(kind), ledger.str());

  const auto& best = result.ledger[result.best_index];
  ordered_json j;
  j["kind"] = to_string(kind);
  j["params"] = to_json(result.best_params);
  j["model_seed"] = result.model_seed;
  j["seed"] = cfg.seed;
  j["folds"] = cfg.folds;
  j["iterations"] = cfg.iterations;
  j["candidates"] = result.ledger.size();
  j["best_index"] = result.best_index;
  j["stratified"] = result.stratified;
  j["exhausted"] = result.exhausted;
  j["cv"] = {{"mean_acc", best.cv.mean_accuracy},
             {"std_acc", best.cv.std_accuracy},
             {"mean_f1", best.cv.mean_f1},
             {"std_f1", best.cv.std_f1}};
  write_file(cfg.out / files::tune_best(kind), j.dump(2) + "\n");
  return result;
}

std::vector<EvalRow> cmd_eval(const RunConfig& cfg) {
  const auto data = load_run_data(cfg.out, true);
  std::vector<EvalRow> rows;
  for (auto kind : cfg.kinds) {
    const auto best = load_best(cfg.out, kind);
    const auto model = fit_classifier(kind, best.params, data.train.X, data.train.y, {}, best.model_seed);
    rows.push_back({kind, error_rate(data.train.y, model->predict_labels(data.train.X)),
                    error_rate(data.test.y, model->predict_labels(data.test.X))});
  }
  std::ostringstream out;
  csv::write_row(out, {"kind", "classifier", "train_error", "test_error"});
  for (const auto& r : rows)
    csv::write_row(out, {to_string(r.kind), display_name(r.kind), format_error(r.train_error), format_error(r.test_error)});
  write_file(cfg.out / files::kEval, out.str());
  return rows;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& cfg, EnsembleMethod method, ClassifierKind base) {
  const auto data = load_run_data(cfg.out, true);
  const auto best = load_best(cfg.out, base);
  EnsembleParams p;
  p.method = method;
  p.base = {base, best.params, best.model_seed};
  p.adaboost_learning_rate = cfg.adaboost_learning_rate;
  p.seed = derive_seed(cfg.seed, "ensemble:" + to_string(method) + ":" + to_string(base));
  p.threads = cfg.threads;
  const auto rows = sweep(data.train.X, data.train.y, data.test.X, data.test.y, p, cfg.estimators);
  std::ostringstream out;
  write_sweep_csv(out, rows);
  write_file(cfg.out / files::sweep_csv(method, base), out.str());
  return rows;
}

std::string ensemble_display_name(EnsembleMethod m, ClassifierKind base) {
  return std::string(m == EnsembleMethod::bagging ? "Bagging" : "Adaboost") + " Ensemble (" + display_name(base) + ")";
}

Summary cmd_report(const RunConfig& cfg) {
  Summary s;
  const auto eval_path = cfg.out / files::kEval;
  const auto eval = read_csv_file(eval_path);
  for (std::size_t i = 1; i < eval.size(); ++i) {
    const auto& f = eval[i].fields;
    if (f.size() != 4) throw DataError(eval_path.string() + ": line " + std::to_string(eval[i].line) + ": expected 4 fields");
    s.standalone.push_back({parse_kind(f[0]), parse_real(f[2], eval_path), parse_real(f[3], eval_path)});
  }

  for (const auto& spec : cfg.sweeps) {
    const auto path = cfg.out / files::sweep_csv(spec.method, spec.base);
    if (!fs::exists(path)) continue;
    EnsembleSummary e;
    e.method = spec.method;
    e.base = spec.base;
    const auto recs = read_csv_file(path);
    for (std::size_t i = 1; i < recs.size(); ++i) {
      const auto& f = recs[i].fields;
      if (f.size() != 3) throw DataError(path.string() + ": line " + std::to_string(recs[i].line) + ": expected 3 fields");
      e.rows.push_back({static_cast<int>(parse_real(f[0], path)), parse_real(f[1], path), parse_real(f[2], path)});
    }
    if (e.rows.empty()) throw DataError(path.string() + ": no rows");
    e.best = e.rows.front();
    for (const auto& r : e.rows) {
      if (r.test_error < e.best.test_error) e.best = r;
      if (r.train_error == 0.0 && !e.first_perfect_fit) e.first_perfect_fit = r.n_estimators;
    }
    for (const auto& b : s.standalone)
      if (b.kind == spec.base) e.base_row = b;
    s.ensembles.push_back(std::move(e));
  }

  std::ostringstream txt, out;
  csv::write_row(out, {"model", "method", "base", "n_estimators", "train_error", "test_error", "test_accuracy", "vs_base"});
  for (const auto& r : s.standalone)
    csv::write_row(out, {display_name(r.kind), "standalone", to_string(r.kind), "", format_error(r.train_error),
                         format_error(r.test_error), format_error(1.0 - r.test_error), ""});
  auto verdict = [](const EnsembleSummary& e) -> std::string {
    if (!e.base_row) return "";
    if (e.best.test_error < e.base_row->test_error) return "better";
    return e.best.test_error == e.base_row->test_error ? "equal" : "worse";
  };
  for (const auto& e : s.ensembles)
    csv::write_row(out, {ensemble_display_name(e.method, e.base), to_string(e.method), to_string(e.base),
                         std::to_string(e.best.n_estimators), format_error(e.best.train_error),
                         format_error(e.best.test_error), format_error(1.0 - e.best.test_error), verdict(e)});

  txt << "Training and test errors\n";
  std::size_t width = 10;
  for (const auto& r : s.standalone) width = std::max(width, display_name(r.kind).size());
  for (const auto& e : s.ensembles) width = std::max(width, ensemble_display_name(e.method, e.base).size());
  auto line = [&](const std::string& name, const std::string& a, const std::string& b, const std::string& extra) {
    txt << name << std::string(width - name.size() + 2, ' ') << a << std::string(a.size() < 12 ? 12 - a.size() : 1, ' ')
        << b << extra << '\n';
  };
  line("Classifier", "Train error", "Test error", "");
  for (const auto& r : s.standalone)
    line(display_name(r.kind), format_fixed(r.train_error, 3), format_fixed(r.test_error, 3), "");
  for (const auto& e : s.ensembles)
    line(ensemble_display_name(e.method, e.base), format_fixed(e.best.train_error, 3), format_fixed(e.best.test_error, 3),
         "   (" + std::to_string(e.best.n_estimators) + " estimators)");

  txt << '\n';
  if (!s.standalone.empty()) {
    const auto it = std::min_element(s.standalone.begin(), s.standalone.end(),
                                     [](const EvalRow& a, const EvalRow& b) { return a.test_error < b.test_error; });
    txt << "Best stand-alone: " << display_name(it->kind) << ", test accuracy " << format_fixed(1.0 - it->test_error, 3)
        << '\n';
  }
  if (!s.ensembles.empty()) {
    const auto it = std::min_element(s.ensembles.begin(), s.ensembles.end(), [](const auto& a, const auto& b) {
      return a.best.test_error < b.best.test_error;
    });
    txt << "Best ensemble: " << ensemble_display_name(it->method, it->base) << " with " << it->best.n_estimators
        << " estimators, test accuracy " << format_fixed(1.0 - it->best.test_error, 3) << '\n';
  }
  for (const auto& e : s.ensembles) {
    txt << ensemble_display_name(e.method, e.base) << ": min test error " << format_fixed(e.best.test_error, 3) << " at "
        << e.best.n_estimators << " estimators";
    if (e.base_row)
      txt << "; base " << display_name(e.base) << " " << format_fixed(e.base_row->test_error, 3) << " (" << verdict(e) << ")";
    if (e.first_perfect_fit) txt << "; training error 0 from " << *e.first_perfect_fit << " estimators";
    txt << '\n';
  }
  write_file(cfg.out / files::kSummaryText, txt.str());
  write_file(cfg.out / files::kSummaryCsv, out.str());
  return s;
}

Summary run_pipeline(const RunConfig& cfg, bool verbose) {
  cfg.validate();
  for (const auto& s : cfg.sweeps)
    if (std::find(cfg.kinds.begin(), cfg.kinds.end(), s.base) == cfg.kinds.end())
      throw UsageError("sweep base " + to_string(s.base) + " is not among the tuned kinds");
  auto note = [&](const std::string& msg) {
    if (verbose) std::cerr << msg << std::endl;
  };
  note("prep");
  cmd_prep(cfg);
  note("embed");
  cmd_embed(cfg);
  for (auto k : cfg.kinds) {
    note("tune " + to_string(k));
    const auto r = cmd_tune(cfg, k);
    if (!r.stratified) std::cerr << "warning: a class has fewer members than folds; CV folds are not stratified\n";
  }
  note("eval");
  cmd_eval(cfg);
  for (const auto& s : cfg.sweeps) {
    note("sweep " + to_string(s.method) + " " + to_string(s.base));
    cmd_sweep(cfg, s.method, s.base);
  }
  note("report");
  return cmd_report(cfg);
}

}  // namespace revboost
