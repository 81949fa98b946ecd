#include "revboost/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "revboost/csv.hpp"
#include "revboost/rng.hpp"

namespace revboost {

std::string to_string(Label l) { return l == Label::fake ? "fake" : "real"; }
std::string to_string(Polarity p) { return p == Polarity::positive ? "positive" : "negative"; }

Label parse_label(std::string_view s) {
  if (s == "fake") return Label::fake;
  if (s == "real") return Label::real;
  throw DataError("unknown label '" + std::string(s) + "'");
}

Polarity parse_polarity(std::string_view s) {
  if (s == "positive") return Polarity::positive;
  if (s == "negative") return Polarity::negative;
  throw DataError("unknown polarity '" + std::string(s) + "'");
}

std::size_t Corpus::count(Label l) const {
  return static_cast<std::size_t>(std::count_if(reviews.begin(), reviews.end(), [l](const Review& r) { return r.label == l; }));
}

std::vector<std::string> Corpus::ids() const {
  std::vector<std::string> out;
  for (const auto& r : reviews) out.push_back(r.id);
  return out;
}

Labels Corpus::labels() const {
  Labels out;
  for (const auto& r : reviews) out.push_back(static_cast<int>(r.label));
  return out;
}

Corpus parse_corpus(std::istream& in) {
  const auto records = csv::read(in);
  if (records.empty()) throw DataError("corpus file is empty (missing header)");
  const std::vector<std::string> header{"id", "restaurant_id", "text", "label", "polarity"};
  if (records[0].fields != header) throw DataError("line 1: expected header id,restaurant_id,text,label,polarity");

  Corpus corpus;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "line " + std::to_string(rec.line);
    if (rec.fields.size() != header.size())
      throw DataError(where + ": expected 5 fields, found " + std::to_string(rec.fields.size()));
    Review review;
    review.id = rec.fields[0];
    review.restaurant_id = rec.fields[1];
    review.text = rec.fields[2];
    if (review.id.empty()) throw DataError(where + ": empty id");
    const std::string who = where + " (id " + review.id + ")";
    if (auto [it, fresh] = seen.emplace(review.id, rec.line); !fresh)
      throw DataError(who + ": duplicate id '" + review.id + "' (first seen on line " + std::to_string(it->second) + ")");
    if (review.restaurant_id.empty()) throw DataError(who + ": empty restaurant_id");
    if (review.text.empty()) throw DataError(who + ": empty text");
    try {
      review.label = parse_label(rec.fields[3]);
      review.polarity = parse_polarity(rec.fields[4]);
    } catch (const DataError& e) {
      throw DataError(who + ": " + e.what());
    }
    corpus.reviews.push_back(std::move(review));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return parse_corpus(in);
}

StopWords parse_stopwords(std::istream& in) {
  StopWords words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    // Normalized like review text so "don't" also removes "dont".
    std::string w;
    for (unsigned char c : line) {
      if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
      if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) w.push_back(static_cast<char>(c));
    }
    if (!w.empty()) words.insert(w);
  }
  return words;
}

StopWords load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stop-word file " + path.string());
  return parse_stopwords(in);
}

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const StopWords& stopwords) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !stopwords.contains(current)) tokens.push_back(current);
    current.clear();
  };
  for (unsigned char c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))
      current.push_back(static_cast<char>(c));
    else if (is_space(c))
      flush();
    // anything else is deleted in place, joining its neighbours
  }
  flush();
  return tokens;
}

TokenizedDoc preprocess(const Review& review, const StopWords& stopwords) {
  TokenizedDoc doc{review.id, tokenize(review.text, stopwords), review.label};
  if (doc.tokens.empty()) throw DataError("review " + review.id + ": empty document after preprocessing");
  return doc;
}

SplitManifest split_dataset(std::span<const std::string> ids, std::span<const int> labels, double test_fraction,
                            std::uint64_t seed) {
  if (ids.size() != labels.size()) throw std::invalid_argument("split_dataset: ids and labels differ in length");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw UsageError("test fraction must lie in (0, 1)");
  const std::size_t n = ids.size();

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, members] : by_class)
    if (members.size() < 2)
      throw DataError("split_dataset: class " + std::to_string(label) + " has fewer than 2 samples");
  if (by_class.size() < 2) throw DataError("split_dataset: need at least two classes");

  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));

  // Largest-remainder apportionment of the test quota to classes.
  std::vector<std::pair<int, std::size_t>> quota;
  std::vector<std::pair<double, int>> remainders;
  std::size_t assigned = 0;
  for (const auto& [label, members] : by_class) {
    const double ideal = static_cast<double>(n_test) * static_cast<double>(members.size()) / static_cast<double>(n);
    const auto base = static_cast<std::size_t>(std::floor(ideal));
    quota.emplace_back(label, base);
    remainders.emplace_back(ideal - static_cast<double>(base), static_cast<int>(quota.size() - 1));
    assigned += base;
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n_test; ++k, ++assigned) ++quota[static_cast<std::size_t>(remainders[k].second)].second;

  Rng rng(derive_seed(seed, "split"));
  std::vector<char> is_test(n, 0);
  for (const auto& [label, count] : quota) {
    auto members = by_class.at(label);
    if (count == 0 || count >= members.size())
      throw DataError("split_dataset: test fraction " + format_double(test_fraction) + " leaves class " +
                      std::to_string(label) + " empty on one side");
    shuffle(members, rng);
    for (std::size_t k = 0; k < count; ++k) is_test[members[k]] = 1;
  }

  SplitManifest m;
  m.seed = seed;
  m.test_fraction = test_fraction;
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? m.test_ids : m.train_ids).push_back(ids[i]);
  return m;
}

SplitManifest split_dataset(const Corpus& corpus, double test_fraction, std::uint64_t seed) {
  const auto ids = corpus.ids();
  const auto labels = corpus.labels();
  return split_dataset(ids, labels, test_fraction, seed);
}

std::string manifest_to_json(const SplitManifest& m) {
  nlohmann::ordered_json j;
  j["seed"] = m.seed;
  j["test_fraction"] = m.test_fraction;
  j["train_ids"] = m.train_ids;
  j["test_ids"] = m.test_ids;
  return j.dump(2) + "\n";
}

SplitManifest manifest_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SplitManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.test_fraction = j.at("test_fraction").get<double>();
    m.train_ids = j.at("train_ids").get<std::vector<std::string>>();
    m.test_ids = j.at("test_ids").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed split manifest: ") + e.what());
  }
}

void write_tokenized(std::ostream& out, const std::vector<TokenizedDoc>& docs) {
  csv::write_row(out, {"id", "label", "tokens"});
  for (const auto& d : docs) {
    std::string joined;
    for (const auto& t : d.tokens) {
      if (!joined.empty()) joined.push_back(' ');
      joined += t;
    }
    csv::write_row(out, {d.id, to_string(d.label), joined});
  }
}

std::vector<TokenizedDoc> read_tokenized(std::istream& in) {
  const auto records = csv::read(in);
  if (records.empty() || records[0].fields != std::vector<std::string>{"id", "label", "tokens"})
    throw DataError("tokenized corpus: expected header id,label,tokens");
  std::vector<TokenizedDoc> docs;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    if (f.size() != 3) throw DataError("tokenized corpus line " + std::to_string(records[r].line) + ": expected 3 fields");
    TokenizedDoc d;
    d.id = f[0];
    d.label = parse_label(f[1]);
    std::istringstream ss(f[2]);
    for (std::string t; ss >> t;) d.tokens.push_back(t);
    if (d.tokens.empty()) throw DataError("tokenized corpus: document " + d.id + " has no tokens");
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace revboost
