#pragma once

#include <string_view>

#include "lfw2vec/corpus.hpp"

namespace lfw2vec {

enum class WindowStrategy {
  Fixed,          // r every position
  RandomDynamic,  // r' uniform on {1..r}, drawn per center word
  EpochBased,     // r' grows with the epoch in equal-length phases
};

std::string_view to_string(WindowStrategy strategy);
WindowStrategy parse_window_strategy(std::string_view text);  // fixed | random | edws

struct WindowSchedule {
  WindowStrategy strategy = WindowStrategy::Fixed;
  int max_window = 15;
  int total_epochs = 6;
  int phase_count = 3;

  /// Throws ConfigError; the epoch-based schedule needs both the window and
  /// the epoch count to be multiples of the phase count.
  void validate() const;
};

/// RandomDynamic draw for one center word.
int window_for_center(const WindowSchedule& schedule, Rng& rng);

/// Epoch-based window for 1-based epoch k:
///   r'_k = ceil(P k / K) * r / P
int window_for_epoch(const WindowSchedule& schedule, int epoch);

/// Window bound in effect for an epoch before any per-center draw: r for
/// Fixed and RandomDynamic, r'_k for EpochBased.
int epoch_window(const WindowSchedule& schedule, int epoch);

}  // namespace lfw2vec
