#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lfw2vec/corpus.hpp"
#include "lfw2vec/trainer.hpp"

namespace lfw2vec {

/// Word list plus one row of `dim` floats per word. This is what gets saved,
/// loaded and evaluated.
struct Embeddings {
  std::vector<std::string> words;
  int dim = 0;
  std::vector<float> values;  // row-major, words.size() x dim

  std::size_t size() const noexcept { return words.size(); }
  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<float> row(std::size_t i) {
    return {values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Pairs the vocabulary with the trained input matrix.
inline Embeddings make_embeddings(const Vocabulary& vocab, const EmbeddingMatrices& matrices) {
  return {vocab.words(), matrices.dim, matrices.input};
}

}  // namespace lfw2vec
