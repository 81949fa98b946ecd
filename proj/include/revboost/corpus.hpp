#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "revboost/common.hpp"

namespace revboost {

enum class Label { real = 0, fake = 1 };
enum class Polarity { negative = 0, positive = 1 };

std::string to_string(Label l);
std::string to_string(Polarity p);
Label parse_label(std::string_view s);
Polarity parse_polarity(std::string_view s);

struct Review {
  std::string id;
  std::string restaurant_id;
  std::string text;
  Label label = Label::real;
  Polarity polarity = Polarity::positive;
};

struct Corpus {
  std::vector<Review> reviews;

  std::size_t size() const { return reviews.size(); }
  std::size_t count(Label l) const;
  std::vector<std::string> ids() const;
  Labels labels() const;
};

struct TokenizedDoc {
  std::string id;
  std::vector<std::string> tokens;
  Label label = Label::real;
};

using StopWords = std::unordered_set<std::string>;

/// Train/test membership. Ids on each side keep corpus order.
struct SplitManifest {
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;

  bool operator==(const SplitManifest&) const = default;
};

inline constexpr double kDefaultTestFraction = 22.0 / 86.0;

/// Reads the review CSV (`id,restaurant_id,text,label,polarity`). Errors name
/// the offending line and, where known, the review id.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::istream& in);

/// One word per line, '#' starts a comment line. Entries are normalized the
/// same way as review text.
StopWords load_stopwords(const std::filesystem::path& path);
StopWords parse_stopwords(std::istream& in);

/// Lowercases, drops every byte outside [a-z0-9] and whitespace, splits on
/// whitespace and removes stop-words. Throws DataError if nothing remains.
TokenizedDoc preprocess(const Review& review, const StopWords& stopwords);
std::vector<std::string> tokenize(std::string_view text, const StopWords& stopwords);

/// Stratified-by-label split. The test side gets round(fraction * n) samples,
/// apportioned to classes by largest remainder.
SplitManifest split_dataset(std::span<const std::string> ids, std::span<const int> labels, double test_fraction,
                            std::uint64_t seed);
SplitManifest split_dataset(const Corpus& corpus, double test_fraction, std::uint64_t seed);

std::string manifest_to_json(const SplitManifest& m);
SplitManifest manifest_from_json(std::string_view text);

/// Tokenized corpus file: `id,label,tokens` with space-joined tokens.
void write_tokenized(std::ostream& out, const std::vector<TokenizedDoc>& docs);
std::vector<TokenizedDoc> read_tokenized(std::istream& in);

}  // namespace revboost
