#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "revboost/common.hpp"
#include "revboost/corpus.hpp"

namespace revboost {

struct EmbeddingConfig {
  int dim = 50;
  int window = 5;
  int epochs = 40;
  int negative = 5;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  int min_count = 1;
  int infer_steps = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Exponent applied to unigram counts to form the negative-sampling distribution.
inline constexpr double kNoisePower = 0.75;

/// Paragraph-vector (PV-DM) model: the center word is predicted from the mean
/// of its context word vectors and the document vector, trained with negative
/// sampling.
struct EmbeddingModel {
  EmbeddingConfig config;
  std::vector<std::string> vocab;        // index -> token
  std::map<std::string, int> index;      // token -> index
  std::vector<std::int64_t> counts;      // per vocab entry
  Matrix word_vectors;                   // |V| x dim
  Matrix doc_vectors;                    // |D| x dim, training docs
  Matrix output_weights;                 // |V| x dim
  std::vector<double> noise_cdf;         // cumulative unigram^0.75
  std::vector<std::string> doc_ids;
  std::vector<double> epoch_losses;      // mean loss per center word, per epoch

  int dim() const { return static_cast<int>(word_vectors.cols()); }
  int lookup(const std::string& token) const;
  /// Index of a noise word for a uniform draw u in [0,1).
  int noise_word(double u) const;
};

struct DocVector {
  std::string id;
  std::vector<double> values;
};

/// One negative-sampling prediction: context words plus a document vector
/// predicting `target` against the listed noise words.
struct PvdmExample {
  std::vector<int> context;
  int target = 0;
  std::vector<int> noise;
};

struct PvdmGradient {
  double loss = 0.0;
  Eigen::VectorXd hidden;       // dL/dh, h = mean of inputs
  std::vector<int> outputs;     // output rows touched: target first, then noise
  Matrix output_grads;          // one row per entry of `outputs`
};

/// Negative-sampling loss and its gradient for one example. `doc_vector` is
/// the document's input vector; each input vector receives hidden / count.
PvdmGradient pvdm_gradient(const Matrix& word_vectors, const Matrix& output_weights,
                           const Eigen::Ref<const Eigen::RowVectorXd>& doc_vector, const PvdmExample& ex);

EmbeddingModel train_embedding(const std::vector<TokenizedDoc>& docs, const EmbeddingConfig& cfg);

/// Fits a fresh document vector with words and output weights frozen. Tokens
/// outside the vocabulary are skipped; a document with none left is a
/// DataError unless steps is 0. The initialization depends only on the
/// model seed and the document id.
DocVector infer_vector(const EmbeddingModel& model, const TokenizedDoc& doc, int steps);

DocVector trained_vector(const EmbeddingModel& model, std::size_t doc_index);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Vector store CSV: `id,v0,...,v{dim-1}`.
void write_vectors(std::ostream& out, const std::vector<DocVector>& vectors);
std::vector<DocVector> read_vectors(std::istream& in);

/// JSON with config, shapes and all parameter matrices.
std::string embedding_to_json(const EmbeddingModel& model);

}  // namespace revboost
