// revboost: fake-review detection pipeline.
//
//   revboost run --corpus data/surrogate_reviews.csv --out run --seed 7
//   revboost tune --kind svm --out run

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "revboost/pipeline.hpp"

#ifndef REVBOOST_DATA_DIR
#define REVBOOST_DATA_DIR "data"
#endif

using namespace revboost;

namespace {

struct Flags {
  std::string config;
  std::string corpus;
  std::string stopwords;
  std::string out;
  std::uint64_t seed = 0;
  int folds = 10;
  int iterations = 100;
  double test_fraction = 0.256;
  unsigned threads = 1;
  bool embed_all = false;
  bool verbose = false;
  std::vector<std::string> kinds;
  std::string method;
  std::string base;
};

RunConfig build_config(const CLI::App& app, const Flags& f) {
  RunConfig cfg;
  cfg.corpus = std::string(REVBOOST_DATA_DIR) + "/surrogate_reviews.csv";
  cfg.stopwords = std::string(REVBOOST_DATA_DIR) + "/stopwords.txt";
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw DataError("cannot read config " + f.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config " + f.config + ": " + e.what());
    }
    apply_config_json(cfg, j);
  }
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--corpus")) cfg.corpus = f.corpus;
  if (given("--stopwords")) cfg.stopwords = f.stopwords;
  if (given("--out")) cfg.out = f.out;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--folds")) cfg.folds = f.folds;
  if (given("--iterations")) cfg.iterations = f.iterations;
  if (given("--test-fraction")) cfg.test_fraction = f.test_fraction;
  if (given("--threads")) cfg.threads = f.threads;
  if (f.embed_all) cfg.embed_all = true;
  cfg.validate();
  return cfg;
}

std::vector<ClassifierKind> selected_kinds(const RunConfig& cfg, const std::vector<std::string>& names) {
  if (names.empty() || (names.size() == 1 && names[0] == "all")) return cfg.kinds;
  std::vector<ClassifierKind> out;
  for (const auto& n : names) out.push_back(parse_kind(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble classifiers for fake review detection"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--corpus", f.corpus, "review CSV (id,restaurant_id,text,label,polarity)");
  app.add_option("--stopwords", f.stopwords, "stop-word list, one per line");
  app.add_option("--out", f.out, "run directory (default: run)");
  app.add_option("--seed", f.seed, "master seed (default 0)");
  app.add_option("--folds", f.folds, "cross-validation folds (default 10)");
  app.add_option("--iterations", f.iterations, "randomized search iterations (default 100)");
  app.add_option("--test-fraction", f.test_fraction, "held-out fraction (default 0.256)");
  app.add_option("--threads", f.threads, "worker threads (default 1)");
  app.add_flag("--embed-all", f.embed_all, "train the embedding on all documents, not just the train split");
  app.add_flag("-v,--verbose", f.verbose, "print progress to stderr");

  auto* prep = app.add_subcommand("prep", "tokenize the corpus");
  auto* embed = app.add_subcommand("embed", "split, train the embedding and write document vectors");
  auto* tune = app.add_subcommand("tune", "randomized search with cross-validation");
  tune->add_option("--kind", f.kinds, "tree, forest, gbt, svm, mlp or all (repeatable)");
  auto* eval = app.add_subcommand("eval", "refit tuned models and report train/test error");
  auto* sweep = app.add_subcommand("sweep", "train/test error over estimator counts 2..22");
  sweep->add_option("--method", f.method, "bagging or adaboost (default: every configured pair)");
  sweep->add_option("--base", f.base, "base classifier kind");
  auto* report = app.add_subcommand("report", "aggregate the run directory into summary.txt and summary.csv");
  auto* run = app.add_subcommand("run", "prep, embed, tune, eval, sweep and report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto cfg = build_config(app, f);
    if (*prep) {
      const auto docs = cmd_prep(cfg);
      std::cout << "tokenized " << docs.size() << " reviews\n";
    } else if (*embed) {
      const auto model = cmd_embed(cfg);
      std::cout << "vocabulary " << model.vocab.size() << ", dimension " << model.dim() << "\n";
    } else if (*tune) {
      for (auto k : selected_kinds(cfg, f.kinds)) {
        const auto r = cmd_tune(cfg, k);
        if (!r.stratified) std::cerr << "warning: a class has fewer members than folds; folds are not stratified\n";
        const auto& best = r.ledger[r.best_index];
        std::cout << display_name(k) << ": " << r.ledger.size() << " candidates, best mean accuracy "
                  << format_fixed(best.cv.mean_accuracy, 3) << "\n";
      }
    } else if (*eval) {
      for (const auto& row : cmd_eval(cfg))
        std::cout << display_name(row.kind) << ": train error " << format_fixed(row.train_error, 3) << ", test error "
                  << format_fixed(row.test_error, 3) << "\n";
    } else if (*sweep) {
      std::vector<SweepSpec> specs;
      if (f.method.empty() && f.base.empty()) {
        specs = cfg.sweeps;
      } else {
        if (f.method.empty() || f.base.empty()) throw UsageError("--method and --base go together");
        specs.push_back({parse_method(f.method), parse_kind(f.base)});
      }
      for (const auto& s : specs) {
        if (s.method == EnsembleMethod::adaboost && !accepts_sample_weights(s.base))
          throw UsageError(display_name(s.base) + " cannot be boosted");
        const auto rows = cmd_sweep(cfg, s.method, s.base);
        std::cout << files::sweep_csv(s.method, s.base) << ": " << rows.size() << " points\n";
      }
    } else if (*report) {
      cmd_report(cfg);
      std::ifstream in(cfg.out / files::kSummaryText);
      std::cout << in.rdbuf();
    } else if (*run) {
      run_pipeline(cfg, f.verbose);
      std::ifstream in(cfg.out / files::kSummaryText);
      std::cout << in.rdbuf();
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
