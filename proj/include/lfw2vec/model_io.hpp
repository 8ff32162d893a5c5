#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "lfw2vec/embeddings.hpp"
#include "lfw2vec/lfw_weights.hpp"
#include "lfw2vec/trainer.hpp"

namespace lfw2vec {

enum class ModelFormat { Text, Binary };

ModelFormat parse_model_format(std::string_view text);  // text | bin

// Text layout: "vocab_size dim\n" then "word f1 ... fd\n" per word, values
// printed with 6 significant digits.
void save_text(const Embeddings& model, std::ostream& out);
void save_text(const Embeddings& model, const std::filesystem::path& path);
Embeddings load_text(std::istream& in);
Embeddings load_text(const std::filesystem::path& path);

// Binary layout: ASCII "vocab_size dim\n", then per word the ASCII word, one
// space, dim little-endian float32 values and '\n'.
void save_binary(const Embeddings& model, std::ostream& out);
void save_binary(const Embeddings& model, const std::filesystem::path& path);
Embeddings load_binary(std::istream& in);
Embeddings load_binary(const std::filesystem::path& path);

void save_model(const Embeddings& model, const std::filesystem::path& path, ModelFormat format);

/// Guesses the layout from the first record.
ModelFormat detect_model_format(const std::filesystem::path& path);
Embeddings load_model(const std::filesystem::path& path);

/// Run metadata kept next to the model file.
struct Sidecar {
  TrainConfig config;
  std::optional<LfwParams> lfw;
  std::size_t vocab_size = 0;
  std::int64_t corpus_tokens = 0;
  std::string corpus;
};

void save_sidecar(const Sidecar& sidecar, std::ostream& out);
void save_sidecar(const Sidecar& sidecar, const std::filesystem::path& path);
Sidecar load_sidecar(std::istream& in);
Sidecar load_sidecar(const std::filesystem::path& path);

}  // namespace lfw2vec
