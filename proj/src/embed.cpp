#include "revboost/embed.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "revboost/csv.hpp"
#include "revboost/rng.hpp"

namespace revboost {

namespace {

// log(sigmoid(s)) without overflow.
double log_sigmoid(double s) { return s >= 0.0 ? -std::log1p(std::exp(-s)) : s - std::log1p(std::exp(s)); }

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

void init_uniform(Matrix& m, int dim, Rng& rng) {
  const double half = 0.5 / dim;
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform_real(rng, -half, half);
}

std::vector<int> in_vocab(const EmbeddingModel& model, const std::vector<std::string>& tokens) {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (int k = model.lookup(t); k >= 0) out.push_back(k);
  return out;
}

void fill_example(PvdmExample& ex, const std::vector<int>& seq, std::size_t pos, int window) {
  ex.context.clear();
  const auto lo = pos >= static_cast<std::size_t>(window) ? pos - static_cast<std::size_t>(window) : 0;
  const auto hi = std::min(seq.size() - 1, pos + static_cast<std::size_t>(window));
  for (std::size_t j = lo; j <= hi; ++j)
    if (j != pos) ex.context.push_back(seq[j]);
  ex.target = seq[pos];
}

void draw_noise(PvdmExample& ex, const EmbeddingModel& model, int negative, Rng& rng) {
  ex.noise.clear();
  for (int k = 0; k < negative; ++k) {
    const int w = model.noise_word(uniform01(rng));
    if (w != ex.target) ex.noise.push_back(w);
  }
}

double lr_at(const EmbeddingConfig& cfg, std::size_t step, std::size_t total) {
  if (total <= 1) return cfg.lr_start;
  const double t = static_cast<double>(step) / static_cast<double>(total - 1);
  return cfg.lr_start + (cfg.lr_end - cfg.lr_start) * t;
}

}  // namespace

void EmbeddingConfig::validate() const {
  if (dim < 1) throw UsageError("embedding dim must be >= 1");
  if (window < 1) throw UsageError("embedding window must be >= 1");
  if (epochs < 1) throw UsageError("embedding epochs must be >= 1");
  if (negative < 1) throw UsageError("negative samples must be >= 1");
  if (min_count < 1) throw UsageError("min_count must be >= 1");
  if (infer_steps < 0) throw UsageError("inference steps must be >= 0");
  if (!(lr_start > lr_end && lr_end > 0.0)) throw UsageError("learning rates must satisfy lr_start > lr_end > 0");
}

int EmbeddingModel::lookup(const std::string& token) const {
  auto it = index.find(token);
  return it == index.end() ? -1 : it->second;
}

int EmbeddingModel::noise_word(double u) const {
  auto it = std::upper_bound(noise_cdf.begin(), noise_cdf.end(), u);
  if (it == noise_cdf.end()) --it;
  return static_cast<int>(it - noise_cdf.begin());
}

PvdmGradient pvdm_gradient(const Matrix& word_vectors, const Matrix& output_weights,
                           const Eigen::Ref<const Eigen::RowVectorXd>& doc_vector, const PvdmExample& ex) {
  const auto dim = doc_vector.size();
  Eigen::RowVectorXd h = doc_vector;
  for (int c : ex.context) h += word_vectors.row(c);
  h /= static_cast<double>(ex.context.size() + 1);

  PvdmGradient g;
  g.hidden = Eigen::VectorXd::Zero(dim);
  g.outputs.reserve(ex.noise.size() + 1);
  g.outputs.push_back(ex.target);
  g.outputs.insert(g.outputs.end(), ex.noise.begin(), ex.noise.end());
  g.output_grads.resize(static_cast<Eigen::Index>(g.outputs.size()), dim);

  for (std::size_t k = 0; k < g.outputs.size(); ++k) {
    const auto o = g.outputs[k];
    const double label = k == 0 ? 1.0 : 0.0;
    const double s = output_weights.row(o).dot(h);
    g.loss -= k == 0 ? log_sigmoid(s) : log_sigmoid(-s);
    const double err = sigmoid(s) - label;
    g.hidden += err * output_weights.row(o).transpose();
    g.output_grads.row(static_cast<Eigen::Index>(k)) = err * h;
  }
  return g;
}

EmbeddingModel train_embedding(const std::vector<TokenizedDoc>& docs, const EmbeddingConfig& cfg) {
  cfg.validate();
  if (docs.empty()) throw DataError("train_embedding: no documents");

  EmbeddingModel model;
  model.config = cfg;

  std::map<std::string, std::int64_t> freq;
  for (const auto& d : docs)
    for (const auto& t : d.tokens) ++freq[t];
  std::vector<std::pair<std::string, std::int64_t>> entries;
  for (const auto& [tok, c] : freq)
    if (c >= cfg.min_count) entries.emplace_back(tok, c);
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (entries.empty()) throw DataError("train_embedding: no token reaches min_count");
  for (const auto& [tok, c] : entries) {
    model.index[tok] = static_cast<int>(model.vocab.size());
    model.vocab.push_back(tok);
    model.counts.push_back(c);
  }

  double total = 0.0;
  for (auto c : model.counts) total += std::pow(static_cast<double>(c), kNoisePower);
  double acc = 0.0;
  for (auto c : model.counts) {
    acc += std::pow(static_cast<double>(c), kNoisePower) / total;
    model.noise_cdf.push_back(acc);
  }
  model.noise_cdf.back() = 1.0;

  const auto V = static_cast<Eigen::Index>(model.vocab.size());
  const auto D = static_cast<Eigen::Index>(docs.size());
  model.word_vectors.resize(V, cfg.dim);
  model.doc_vectors.resize(D, cfg.dim);
  model.output_weights = Matrix::Zero(V, cfg.dim);
  Rng init_rng(derive_seed(cfg.seed, "embed-init"));
  init_uniform(model.word_vectors, cfg.dim, init_rng);
  init_uniform(model.doc_vectors, cfg.dim, init_rng);

  std::vector<std::vector<int>> seqs;
  std::size_t per_epoch = 0;
  for (const auto& d : docs) {
    model.doc_ids.push_back(d.id);
    seqs.push_back(in_vocab(model, d.tokens));
    per_epoch += seqs.back().size();
  }
  const std::size_t total_steps = per_epoch * static_cast<std::size_t>(cfg.epochs);

  Rng rng(derive_seed(cfg.seed, "embed-train"));
  PvdmExample ex;
  std::size_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t d = 0; d < seqs.size(); ++d) {
      const auto& seq = seqs[d];
      for (std::size_t pos = 0; pos < seq.size(); ++pos, ++step) {
        fill_example(ex, seq, pos, cfg.window);
        draw_noise(ex, model, cfg.negative, rng);
        const double lr = lr_at(cfg, step, total_steps);
        const auto doc_row = static_cast<Eigen::Index>(d);
        const auto g = pvdm_gradient(model.word_vectors, model.output_weights, model.doc_vectors.row(doc_row), ex);
        epoch_loss += g.loss;
        for (std::size_t k = 0; k < g.outputs.size(); ++k)
          model.output_weights.row(g.outputs[k]) -= lr * g.output_grads.row(static_cast<Eigen::Index>(k));
        const Eigen::RowVectorXd input_step = (lr / static_cast<double>(ex.context.size() + 1)) * g.hidden.transpose();
        for (int c : ex.context) model.word_vectors.row(c) -= input_step;
        model.doc_vectors.row(doc_row) -= input_step;
      }
    }
    model.epoch_losses.push_back(per_epoch ? epoch_loss / static_cast<double>(per_epoch) : 0.0);
  }

  if (!model.word_vectors.allFinite() || !model.doc_vectors.allFinite() || !model.output_weights.allFinite())
    throw NumericError("train_embedding: parameters diverged");
  return model;
}

DocVector infer_vector(const EmbeddingModel& model, const TokenizedDoc& doc, int steps) {
  if (steps < 0) throw std::invalid_argument("infer_vector: steps must be >= 0");
  const auto seq = in_vocab(model, doc.tokens);
  if (seq.empty() && steps > 0) throw DataError("infer_vector: document " + doc.id + " has no in-vocabulary tokens");
  const auto doc_seed = derive_seed(derive_seed(model.config.seed, "infer"), doc.id);
  Rng rng(doc_seed);
  Matrix vec(1, model.dim());
  init_uniform(vec, model.dim(), rng);

  const std::size_t total_steps = seq.size() * static_cast<std::size_t>(steps);
  PvdmExample ex;
  std::size_t step = 0;
  for (int epoch = 0; epoch < steps; ++epoch) {
    for (std::size_t pos = 0; pos < seq.size(); ++pos, ++step) {
      fill_example(ex, seq, pos, model.config.window);
      draw_noise(ex, model, model.config.negative, rng);
      const double lr = lr_at(model.config, step, total_steps);
      const auto g = pvdm_gradient(model.word_vectors, model.output_weights, vec.row(0), ex);
      vec.row(0) -= (lr / static_cast<double>(ex.context.size() + 1)) * g.hidden.transpose();
    }
  }
  if (!vec.allFinite()) throw NumericError("infer_vector: document " + doc.id + " diverged");
  return {doc.id, std::vector<double>(vec.data(), vec.data() + vec.size())};
}

DocVector trained_vector(const EmbeddingModel& model, std::size_t doc_index) {
  const auto r = model.doc_vectors.row(static_cast<Eigen::Index>(doc_index));
  return {model.doc_ids.at(doc_index), std::vector<double>(r.data(), r.data() + r.size())};
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

void write_vectors(std::ostream& out, const std::vector<DocVector>& vectors) {
  const std::size_t dim = vectors.empty() ? 0 : vectors.front().values.size();
  std::vector<std::string> header{"id"};
  for (std::size_t k = 0; k < dim; ++k) header.push_back("v" + std::to_string(k));
  csv::write_row(out, header);
  for (const auto& v : vectors) {
    if (v.values.size() != dim) throw std::invalid_argument("write_vectors: ragged vector store");
    std::vector<std::string> fields{v.id};
    for (double x : v.values) fields.push_back(format_double(x));
    csv::write_row(out, fields);
  }
}

std::vector<DocVector> read_vectors(std::istream& in) {
  const auto records = csv::read(in);
  if (records.empty() || records[0].fields.empty() || records[0].fields[0] != "id")
    throw DataError("vector store: expected header id,v0,...");
  const std::size_t dim = records[0].fields.size() - 1;
  for (std::size_t k = 0; k < dim; ++k)
    if (records[0].fields[k + 1] != "v" + std::to_string(k)) throw DataError("vector store: bad column name " + records[0].fields[k + 1]);
  std::vector<DocVector> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    if (f.size() != dim + 1) throw DataError("vector store line " + std::to_string(records[r].line) + ": expected " + std::to_string(dim + 1) + " fields");
    DocVector v{f[0], {}};
    for (std::size_t k = 1; k < f.size(); ++k) {
      try {
        std::size_t used = 0;
        v.values.push_back(std::stod(f[k], &used));
        if (used != f[k].size()) throw std::invalid_argument(f[k]);
      } catch (const std::exception&) {
        throw DataError("vector store line " + std::to_string(records[r].line) + ": not a number '" + f[k] + "'");
      }
      if (!std::isfinite(v.values.back())) throw DataError("vector store line " + std::to_string(records[r].line) + ": non-finite value");
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

nlohmann::ordered_json matrix_json(const Matrix& m) {
  nlohmann::ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

}  // namespace

std::string embedding_to_json(const EmbeddingModel& model) {
  const auto& c = model.config;
  nlohmann::ordered_json j;
  j["format"] = "revboost-pvdm-1";
  j["config"] = {{"dim", c.dim},           {"window", c.window},     {"epochs", c.epochs},
                 {"negative", c.negative}, {"lr_start", c.lr_start}, {"lr_end", c.lr_end},
                 {"min_count", c.min_count}, {"infer_steps", c.infer_steps}, {"seed", c.seed},
                 {"noise_power", kNoisePower}};
  j["vocab"] = model.vocab;
  j["counts"] = model.counts;
  j["doc_ids"] = model.doc_ids;
  j["epoch_losses"] = model.epoch_losses;
  j["word_vectors"] = matrix_json(model.word_vectors);
  j["doc_vectors"] = matrix_json(model.doc_vectors);
  j["output_weights"] = matrix_json(model.output_weights);
  return j.dump() + "\n";
}

}  // namespace revboost
