#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lfw2vec {

using WordId = std::int32_t;
using Rng = std::mt19937_64;

/// Words retained after the frequency cutoff, sorted by descending count
/// (ties broken lexicographically). Ids are positions in that order.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Builds from raw counts, dropping words with count <= `discard_at_most`.
  static Vocabulary from_counts(const std::unordered_map<std::string, std::int64_t>& counts,
                                std::int64_t discard_at_most);

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

  const std::string& word(WordId id) const { return words_.at(static_cast<std::size_t>(id)); }
  std::int64_t count(WordId id) const { return counts_.at(static_cast<std::size_t>(id)); }
  std::optional<WordId> find(const std::string& word) const;

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }

  /// Sum of retained counts.
  std::int64_t total_tokens() const noexcept { return total_tokens_; }

 private:
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
  std::int64_t total_tokens_ = 0;
};

/// Calls `sink` for every whitespace-separated token. Reads in fixed-size
/// chunks; the stream is never held in memory as a whole.
void for_each_token(std::istream& in, const std::function<void(std::string_view)>& sink);

/// Default: words appearing no more than 5 times are discarded.
inline constexpr std::int64_t kDefaultDiscardAtMost = 5;

Vocabulary build_vocabulary(std::istream& in, std::int64_t discard_at_most = kDefaultDiscardAtMost);
Vocabulary build_vocabulary(const std::filesystem::path& path,
                            std::int64_t discard_at_most = kDefaultDiscardAtMost);

/// Writes one "word count" line per entry, descending count.
void save_vocabulary(const Vocabulary& vocab, std::ostream& out);

/// Maps tokens to ids, dropping words outside the vocabulary.
std::vector<WordId> encode_tokens(std::istream& in, const Vocabulary& vocab);

/// Vocabulary plus the id sequence of the whole corpus as a single stream.
struct Corpus {
  Vocabulary vocab;
  std::vector<WordId> tokens;
};

Corpus load_corpus(const std::filesystem::path& path,
                   std::int64_t discard_at_most = kDefaultDiscardAtMost);
Corpus make_corpus(std::istream& in, std::int64_t discard_at_most = kDefaultDiscardAtMost);

/// Frequent-word subsampling: an occurrence of w is kept with probability
/// min(1, sqrt(t/f(w)) + t/f(w)), f(w) = count/total. A threshold <= 0
/// disables subsampling.
class Subsampler {
 public:
  Subsampler(const Vocabulary& vocab, double threshold);

  bool enabled() const noexcept { return !keep_.empty(); }
  double keep_probability(WordId id) const;

  /// Appends the retained tokens of `tokens` to `out`.
  void apply(std::span<const WordId> tokens, Rng& rng, std::vector<WordId>& out) const;

 private:
  std::vector<double> keep_;
};

/// Context extent around one center, truncated at stream ends.
struct ContextSpan {
  int left = 0;   // offsets -left..-1 are present
  int right = 0;  // offsets 1..right are present

  int size() const noexcept { return left + right; }
};

ContextSpan context_span(std::size_t position, std::size_t length, int window);

struct Position {
  std::size_t index = 0;
  WordId center = 0;
  ContextSpan context;
};

/// Sliding window over a token sequence with truncation at both ends.
class PositionStream {
 public:
  PositionStream(std::span<const WordId> tokens, int window);

  std::optional<Position> next();

 private:
  std::span<const WordId> tokens_;
  int window_;
  std::size_t cursor_ = 0;
};

/// Draws words from counts^exponent / sum(counts^exponent) with Vose's
/// alias method.
class NegativeSampler {
 public:
  NegativeSampler(std::span<const std::int64_t> counts, double exponent = 0.75);

  std::size_t size() const noexcept { return prob_.size(); }
  double probability(WordId id) const { return mass_.at(static_cast<std::size_t>(id)); }

  WordId draw(Rng& rng) const;

  /// Fills `out` with draws, redrawing any draw equal to `exclude`.
  /// Throws DegenerateVocabulary when no other word has positive mass.
  void sample(WordId exclude, Rng& rng, std::span<WordId> out) const;
  std::vector<WordId> sample(std::size_t k, WordId exclude, Rng& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<WordId> alias_;
  std::vector<double> mass_;
};

}  // namespace lfw2vec
