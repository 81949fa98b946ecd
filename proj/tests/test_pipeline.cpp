#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "revboost/csv.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "revboost_pipeline_test";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(REVBOOST_CLI) + " " + args + " >>" + (kWork / "cli.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<revboost::csv::Record> read_csv(const fs::path& p) {
  std::ifstream in(p);
  return revboost::csv::read(in);
}

// Small spaces and few iterations so a whole run takes seconds.
void write_fast_config(const fs::path& p) {
  std::ofstream(p) << R"({
    "folds": 3,
    "iterations": 2,
    "estimators": [2, 4],
    "embedding": {"epochs": 5, "infer_steps": 10},
    "space": {
      "forest": {"n_estimators": {"lo": 5, "hi": 10}},
      "gbt": {"n_estimators": {"lo": 5, "hi": 10}},
      "mlp": {"max_iterations": {"values": [20]}}
    }
  })";
}

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    write_fast_config(kWork / "fast.json");
  }
};

}  // namespace

TEST_CASE("full run through the command line") {
  Workspace ws;
  const std::string common = "--config " + (kWork / "fast.json").string() + " --seed 3";
  REQUIRE(run_cli(common + " --out " + (kWork / "a").string() + " run") == 0);
  REQUIRE(run_cli(common + " --out " + (kWork / "b").string() + " run") == 0);

  SUBCASE("same seed, byte-identical files") {
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(kWork / "a")) names.insert(e.path().filename().string());
    CHECK(names.size() == 7 + 4 * 5 + 4);
    for (const auto& n : names) {
      CAPTURE(n);
      REQUIRE(fs::exists(kWork / "b" / n));
      CHECK(slurp(kWork / "a" / n) == slurp(kWork / "b" / n));
    }
  }

  SUBCASE("file formats") {
    const auto vectors = read_csv(kWork / "a" / "vectors.csv");
    REQUIRE(vectors.size() == 87);
    for (const auto& r : vectors) CHECK(r.fields.size() == 51);
    CHECK(vectors[0].fields[0] == "id");
    CHECK(vectors[0].fields[50] == "v49");

    const auto eval = read_csv(kWork / "a" / "eval.csv");
    REQUIRE(eval.size() == 6);
    CHECK(eval[0].fields == std::vector<std::string>{"kind", "classifier", "train_error", "test_error"});

    const auto sweep = read_csv(kWork / "a" / "sweep_adaboost_mlp.csv");
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[0].fields == std::vector<std::string>{"n_estimators", "train_error", "test_error"});
    CHECK(sweep[2].fields[0] == "4");

    const auto best = nlohmann::json::parse(slurp(kWork / "a" / "tune_svm_best.json"));
    CHECK(best.at("kind") == "svm");
    CHECK(best.at("candidates") == 2);
    CHECK(best.at("folds") == 3);

    const auto summary = read_csv(kWork / "a" / "summary.csv");
    CHECK(summary[0].fields == std::vector<std::string>{"model", "method", "base", "n_estimators", "train_error",
                                                         "test_error", "test_accuracy", "vs_base"});
    CHECK(slurp(kWork / "a" / "summary.txt").find("Adaboost Ensemble (MLP)") != std::string::npos);
  }

  SUBCASE("the embedding vocabulary comes from training documents only") {
    const auto split = nlohmann::json::parse(slurp(kWork / "a" / "split.json"));
    const auto train_ids = split.at("train_ids").get<std::vector<std::string>>();
    const auto test_ids = split.at("test_ids").get<std::vector<std::string>>();
    CHECK(train_ids.size() == 64);
    CHECK(test_ids.size() == 22);
    const std::set<std::string> train(train_ids.begin(), train_ids.end());
    std::set<std::string> train_words;
    for (const auto& r : read_csv(kWork / "a" / "tokens.csv")) {
      if (r.line == 1) continue;
      std::istringstream words(r.fields[2]);
      for (std::string w; words >> w;)
        if (train.count(r.fields[0])) train_words.insert(w);
    }
    const auto emb = nlohmann::json::parse(slurp(kWork / "a" / "embedding.json"));
    const auto vocab = emb.at("vocab").get<std::vector<std::string>>();
    // min_count is 1, so the vocabulary is exactly the set of training words.
    CHECK(std::set<std::string>(vocab.begin(), vocab.end()) == train_words);
    CHECK(emb.at("doc_ids").get<std::vector<std::string>>().size() == 64);
  }
}

TEST_CASE("exit codes") {
  Workspace ws;
  CHECK(run_cli("") == 1);
  CHECK(run_cli("--no-such-flag run") == 1);
  CHECK(run_cli("tune --kind lasso") == 1);

  const auto bad = kWork / "bad.csv";
  std::ofstream(bad) << "id,restaurant_id,text,label,polarity\nr1,rest1,\"unterminated,fake,positive\n";
  CHECK(run_cli("--corpus " + bad.string() + " --out " + (kWork / "x").string() + " prep") == 2);

  const auto wrong_label = kWork / "label.csv";
  std::ofstream(wrong_label) << "id,restaurant_id,text,label,polarity\nr1,rest1,nice,maybe,positive\n";
  CHECK(run_cli("--corpus " + wrong_label.string() + " --out " + (kWork / "y").string() + " prep") == 2);

  // eval before tune has nothing to read.
  CHECK(run_cli("--out " + (kWork / "empty").string() + " eval") == 2);
}
