#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revboost/classifier.hpp"
#include "revboost/corpus.hpp"
#include "revboost/embed.hpp"
#include "revboost/meta.hpp"
#include "revboost/tune.hpp"

namespace revboost {

struct SweepSpec {
  EnsembleMethod method = EnsembleMethod::bagging;
  ClassifierKind base = ClassifierKind::svm;
};

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path stopwords;
  std::filesystem::path out = "run";
  std::uint64_t seed = 0;
  double test_fraction = 0.256;
  int folds = 10;
  int iterations = 100;
  unsigned threads = 1;
  EmbeddingConfig embedding;
  /// Train the embedding on every document instead of the train split only.
  bool embed_all = false;
  /// Re-infer train vectors the way test vectors are obtained instead of
  /// using the vectors learned during training.
  bool reinfer_train = true;
  std::vector<ClassifierKind> kinds{std::begin(kAllKinds), std::end(kAllKinds)};
  std::vector<SweepSpec> sweeps{{EnsembleMethod::bagging, ClassifierKind::svm},
                                {EnsembleMethod::adaboost, ClassifierKind::svm},
                                {EnsembleMethod::bagging, ClassifierKind::mlp},
                                {EnsembleMethod::adaboost, ClassifierKind::mlp}};
  std::vector<int> estimators = default_estimator_grid();
  double adaboost_learning_rate = 1.0;
  /// Per-kind space overrides: {"svm": {"C": {"lo": 1, "hi": 10}}}.
  nlohmann::json space_overrides = nlohmann::json::object();

  void validate() const;
};

/// Overlays keys of a config JSON object onto cfg. Unknown keys are errors.
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);

namespace files {
inline const char* const kTokens = "tokens.csv";
inline const char* const kSplit = "split.json";
inline const char* const kVectors = "vectors.csv";
inline const char* const kEmbedding = "embedding.json";
inline const char* const kEval = "eval.csv";
inline const char* const kSummaryText = "summary.txt";
inline const char* const kSummaryCsv = "summary.csv";
std::string tune_top_csv(ClassifierKind k);
std::string tune_top_text(ClassifierKind k);
std::string tune_best(ClassifierKind k);
std::string tune_ledger(ClassifierKind k);
std::string sweep_csv(EnsembleMethod m, ClassifierKind base);
}  // namespace files

/// Train and test sides of a run as recorded by the embed step.
struct RunData {
  SplitManifest manifest;
  Dataset train;
  Dataset test;  // labels left empty unless requested
};

RunData load_run_data(const std::filesystem::path& dir, bool with_test_labels);

struct BestParams {
  ClassifierKind kind = ClassifierKind::tree;
  ParamSet params;
  std::uint64_t model_seed = 0;
};

BestParams load_best(const std::filesystem::path& dir, ClassifierKind kind);

struct EvalRow {
  ClassifierKind kind = ClassifierKind::tree;
  double train_error = 0.0;
  double test_error = 0.0;
};

struct EnsembleSummary {
  EnsembleMethod method = EnsembleMethod::bagging;
  ClassifierKind base = ClassifierKind::svm;
  std::vector<SweepRow> rows;
  std::optional<EvalRow> base_row;
  /// Row with the lowest test error, ties to fewer estimators.
  SweepRow best;
  /// Smallest estimator count with zero training error, if any.
  std::optional<int> first_perfect_fit;
};

struct Summary {
  std::vector<EvalRow> standalone;
  std::vector<EnsembleSummary> ensembles;
};

std::vector<TokenizedDoc> cmd_prep(const RunConfig& cfg);
EmbeddingModel cmd_embed(const RunConfig& cfg);
SearchResult cmd_tune(const RunConfig& cfg, ClassifierKind kind);
std::vector<EvalRow> cmd_eval(const RunConfig& cfg);
std::vector<SweepRow> cmd_sweep(const RunConfig& cfg, EnsembleMethod method, ClassifierKind base);
Summary cmd_report(const RunConfig& cfg);

/// prep, embed, tune (every kind), eval, sweep (every configured pair), report.
Summary run_pipeline(const RunConfig& cfg, bool verbose = false);

std::string ensemble_display_name(EnsembleMethod m, ClassifierKind base);

}  // namespace revboost
