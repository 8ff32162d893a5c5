#include "lfw2vec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "lfw2vec/error.hpp"

namespace lfw2vec {

namespace {

constexpr std::size_t kChunkBytes = 1 << 20;

bool is_separator(char c) { return static_cast<unsigned char>(c) <= ' '; }

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::unordered_map<std::string, std::int64_t> count_words(std::istream& in) {
  std::unordered_map<std::string, std::int64_t> counts;
  std::string key;
  for_each_token(in, [&](std::string_view token) {
    key.assign(token);
    ++counts[key];
  });
  return counts;
}

// Uniform double in [0, 1) from the top 53 bits.
double unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Vocabulary Vocabulary::from_counts(const std::unordered_map<std::string, std::int64_t>& counts,
                                   std::int64_t discard_at_most) {
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (const auto& [word, count] : counts) {
    if (count > discard_at_most) kept.emplace_back(word, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });

  Vocabulary vocab;
  vocab.words_.reserve(kept.size());
  vocab.counts_.reserve(kept.size());
  vocab.index_.reserve(kept.size());
  for (auto& [word, count] : kept) {
    vocab.index_.emplace(word, static_cast<WordId>(vocab.words_.size()));
    vocab.words_.push_back(std::move(word));
    vocab.counts_.push_back(count);
    vocab.total_tokens_ += count;
  }
  return vocab;
}

std::optional<WordId> Vocabulary::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void for_each_token(std::istream& in, const std::function<void(std::string_view)>& sink) {
  std::vector<char> buffer(kChunkBytes);
  std::string carry;
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    std::size_t start = 0;
    for (std::size_t i = 0; i < got; ++i) {
      if (!is_separator(buffer[i])) continue;
      if (!carry.empty()) {
        carry.append(buffer.data() + start, i - start);
        sink(carry);
        carry.clear();
      } else if (i > start) {
        sink(std::string_view(buffer.data() + start, i - start));
      }
      start = i + 1;
    }
    carry.append(buffer.data() + start, got - start);
  }
  if (in.bad()) throw IoError("read failure while scanning corpus");
  if (!carry.empty()) sink(carry);
}

Vocabulary build_vocabulary(std::istream& in, std::int64_t discard_at_most) {
  if (discard_at_most < 0) throw ConfigError("frequency cutoff must be >= 0");
  const auto counts = count_words(in);
  if (counts.empty()) throw Error("empty corpus");
  return Vocabulary::from_counts(counts, discard_at_most);
}

Vocabulary build_vocabulary(const std::filesystem::path& path, std::int64_t discard_at_most) {
  auto in = open_input(path);
  return build_vocabulary(in, discard_at_most);
}

void save_vocabulary(const Vocabulary& vocab, std::ostream& out) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.words()[i] << ' ' << vocab.counts()[i] << '\n';
  }
  if (!out) throw IoError("failed writing vocabulary");
}

std::vector<WordId> encode_tokens(std::istream& in, const Vocabulary& vocab) {
  std::vector<WordId> ids;
  ids.reserve(static_cast<std::size_t>(vocab.total_tokens()));
  std::string key;
  for_each_token(in, [&](std::string_view token) {
    key.assign(token);
    if (auto id = vocab.find(key)) ids.push_back(*id);
  });
  return ids;
}

Corpus make_corpus(std::istream& in, std::int64_t discard_at_most) {
  Corpus corpus;
  corpus.vocab = build_vocabulary(in, discard_at_most);
  in.clear();
  in.seekg(0);
  if (!in) throw IoError("corpus stream is not seekable");
  corpus.tokens = encode_tokens(in, corpus.vocab);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, std::int64_t discard_at_most) {
  auto in = open_input(path);
  return make_corpus(in, discard_at_most);
}

Subsampler::Subsampler(const Vocabulary& vocab, double threshold) {
  if (!(threshold > 0.0) || std::isinf(threshold) || vocab.total_tokens() == 0) return;
  keep_.resize(vocab.size());
  const auto total = static_cast<double>(vocab.total_tokens());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const double ratio = threshold / (static_cast<double>(vocab.counts()[i]) / total);
    keep_[i] = std::min(1.0, std::sqrt(ratio) + ratio);
  }
}

double Subsampler::keep_probability(WordId id) const {
  return keep_.empty() ? 1.0 : keep_.at(static_cast<std::size_t>(id));
}

void Subsampler::apply(std::span<const WordId> tokens, Rng& rng, std::vector<WordId>& out) const {
  if (keep_.empty()) {
    out.insert(out.end(), tokens.begin(), tokens.end());
    return;
  }
  for (WordId id : tokens) {
    const double p = keep_[static_cast<std::size_t>(id)];
    if (p >= 1.0 || unit(rng) < p) out.push_back(id);
  }
}

ContextSpan context_span(std::size_t position, std::size_t length, int window) {
  const auto w = static_cast<std::size_t>(std::max(window, 0));
  ContextSpan span;
  span.left = static_cast<int>(std::min(w, position));
  span.right = static_cast<int>(std::min(w, length - position - 1));
  return span;
}

PositionStream::PositionStream(std::span<const WordId> tokens, int window)
    : tokens_(tokens), window_(window) {
  if (window < 1) throw ConfigError("window must be >= 1");
}

std::optional<Position> PositionStream::next() {
  if (cursor_ >= tokens_.size()) return std::nullopt;
  Position p{cursor_, tokens_[cursor_], context_span(cursor_, tokens_.size(), window_)};
  ++cursor_;
  return p;
}

NegativeSampler::NegativeSampler(std::span<const std::int64_t> counts, double exponent) {
  if (counts.empty()) throw DegenerateVocabulary();
  const std::size_t n = counts.size();
  mass_.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mass_[i] = counts[i] > 0 ? std::pow(static_cast<double>(counts[i]), exponent) : 0.0;
    total += mass_[i];
  }
  if (!(total > 0.0)) throw DegenerateVocabulary();
  for (double& m : mass_) m /= total;

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = mass_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = static_cast<WordId>(l);
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t i : large) prob_[i] = 1.0;
  // Leftovers here are rounding residue; they own their column outright.
  for (std::size_t i : small) prob_[i] = 1.0;
}

WordId NegativeSampler::draw(Rng& rng) const {
  const auto column = static_cast<std::size_t>(
      (static_cast<unsigned __int128>(rng()) * prob_.size()) >> 64);
  return unit(rng) < prob_[column] ? static_cast<WordId>(column) : alias_[column];
}

void NegativeSampler::sample(WordId exclude, Rng& rng, std::span<WordId> out) const {
  if (out.empty()) return;
  const auto ex = static_cast<std::size_t>(exclude);
  if (ex < mass_.size() && mass_[ex] >= 1.0 - 1e-12) throw DegenerateVocabulary();
  for (WordId& slot : out) {
    do {
      slot = draw(rng);
    } while (slot == exclude);
  }
}

std::vector<WordId> NegativeSampler::sample(std::size_t k, WordId exclude, Rng& rng) const {
  if (k < 1) throw ConfigError("negative sample count must be >= 1");
  std::vector<WordId> out(k);
  sample(exclude, rng, out);
  return out;
}

}  // namespace lfw2vec
