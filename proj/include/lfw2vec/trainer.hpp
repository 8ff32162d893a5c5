#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lfw2vec/corpus.hpp"
#include "lfw2vec/lfw_weights.hpp"
#include "lfw2vec/window_schedule.hpp"

namespace lfw2vec {

enum class ModelKind { Cbow, SkipGram };

std::string_view to_string(ModelKind model);
ModelKind parse_model_kind(std::string_view text);  // cbow | skipgram

struct TrainConfig {
  ModelKind model = ModelKind::Cbow;
  int dim = 128;
  WindowStrategy window_strategy = WindowStrategy::Fixed;
  int window = 15;
  int edws_phases = 3;
  int epochs = 6;
  std::optional<LfwFormula> lfw;  // CBOW only
  bool freeze_lfw = false;        // keep weight parameters at their initial values
  int negatives = 5;
  double learning_rate = 0.0;  // 0 selects the model default
  double lfw_lr_scale = 0.1;   // weight-parameter step relative to the embedding step
  int lfw_flush_interval = 10000;
  double subsample = 0.0;  // <= 0 disables
  double distortion = 0.75;
  int threads = 1;
  std::uint64_t seed = 1;

  WindowSchedule schedule() const { return {window_strategy, window, epochs, edws_phases}; }
  double initial_learning_rate() const;
  void validate() const;
};

/// Input (evaluated) and output (negative-sampling) matrices, row-major |V| x d.
struct EmbeddingMatrices {
  std::size_t vocab_size = 0;
  int dim = 0;
  std::vector<float> input;
  std::vector<float> output;

  EmbeddingMatrices() = default;
  /// Input uniform in [-0.5/d, 0.5/d], output zero.
  EmbeddingMatrices(std::size_t vocab_size, int dim, Rng& rng);

  std::span<const float> input_row(WordId id) const {
    return {input.data() + static_cast<std::size_t>(id) * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

struct EpochLog {
  int epoch = 0;
  int window = 0;
  double mean_loss = 0.0;
  std::uint64_t examples = 0;  // positions (CBOW) or pairs (Skip-gram)
  std::optional<LfwParams> lfw;
  double tokens_per_sec = 0.0;
  double seconds = 0.0;
};

std::string format_epoch_log(const EpochLog& log);

struct TrainResult {
  EmbeddingMatrices matrices;
  std::optional<LfwParams> lfw;
  std::vector<EpochLog> epochs;
  double seconds = 0.0;
};

using EpochObserver = std::function<void(const EpochLog&)>;

TrainResult train(const Corpus& corpus, const TrainConfig& config, const EpochObserver& observer = {});
TrainResult train_cbow(const Corpus& corpus, const TrainConfig& config, const EpochObserver& observer = {});
TrainResult train_skipgram(const Corpus& corpus, const TrainConfig& config,
                           const EpochObserver& observer = {});

/// row -= lr * grad
template <class T>
void sgd_step(std::span<T> row, std::span<const T> grad, T lr) {
  for (std::size_t k = 0; k < row.size(); ++k) row[k] -= lr * grad[k];
}

/// Linear decay over the processed fraction of the planned work, floored at
/// 1e-4 x initial.
class LearningRateSchedule {
 public:
  LearningRateSchedule(double initial, std::uint64_t total_work);

  double at(std::uint64_t processed) const;
  double initial() const noexcept { return initial_; }

 private:
  double initial_;
  std::uint64_t total_;
};

}  // namespace lfw2vec
