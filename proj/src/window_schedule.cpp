#include "lfw2vec/window_schedule.hpp"

#include <string>

#include "lfw2vec/error.hpp"

namespace lfw2vec {

std::string_view to_string(WindowStrategy strategy) {
  switch (strategy) {
    case WindowStrategy::Fixed: return "fixed";
    case WindowStrategy::RandomDynamic: return "random";
    case WindowStrategy::EpochBased: return "edws";
  }
  return "fixed";
}

WindowStrategy parse_window_strategy(std::string_view text) {
  if (text == "fixed") return WindowStrategy::Fixed;
  if (text == "random") return WindowStrategy::RandomDynamic;
  if (text == "edws") return WindowStrategy::EpochBased;
  throw ConfigError("unknown window strategy '" + std::string(text) + "' (expected fixed, random or edws)");
}

void WindowSchedule::validate() const {
  if (max_window < 1) throw ConfigError("window must be >= 1");
  if (total_epochs < 1) throw ConfigError("epochs must be >= 1");
  if (strategy != WindowStrategy::EpochBased) return;
  if (phase_count < 1) throw ConfigError("EDWS phase count must be >= 1");
  if (total_epochs % phase_count != 0 || max_window % phase_count != 0) {
    throw ConfigError("EDWS needs epochs (" + std::to_string(total_epochs) + ") and window (" +
                      std::to_string(max_window) + ") to be multiples of the phase count (" +
                      std::to_string(phase_count) + "); e.g. --epochs 6 --window 15 with 3 phases");
  }
}

int window_for_center(const WindowSchedule& schedule, Rng& rng) {
  if (schedule.strategy != WindowStrategy::RandomDynamic) {
    throw ConfigError("window_for_center requires the random strategy");
  }
  const auto r = static_cast<unsigned __int128>(schedule.max_window);
  return 1 + static_cast<int>((static_cast<unsigned __int128>(rng()) * r) >> 64);
}

int window_for_epoch(const WindowSchedule& schedule, int epoch) {
  if (schedule.strategy != WindowStrategy::EpochBased) {
    throw ConfigError("window_for_epoch requires the edws strategy");
  }
  schedule.validate();
  if (epoch < 1 || epoch > schedule.total_epochs) {
    throw ConfigError("epoch " + std::to_string(epoch) + " outside 1.." + std::to_string(schedule.total_epochs));
  }
  const int p = schedule.phase_count;
  const int phase = (p * epoch + schedule.total_epochs - 1) / schedule.total_epochs;
  return phase * (schedule.max_window / p);
}

int epoch_window(const WindowSchedule& schedule, int epoch) {
  return schedule.strategy == WindowStrategy::EpochBased ? window_for_epoch(schedule, epoch)
                                                         : schedule.max_window;
}

}  // namespace lfw2vec
