#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lfw2vec/evaluator.hpp"
#include "lfw2vec/trainer.hpp"

namespace lfw2vec {

/// One configuration in a same-corpus comparison.
struct ExperimentArm {
  std::string name;
  TrainConfig config;
};

struct ArmResult {
  std::string name;
  TrainConfig config;
  std::uint64_t seed = 0;
  EvalReport report;
  std::optional<LfwParams> lfw;
  double train_seconds = 0.0;
};

/// Arms for a named recipe, all sharing `base` except for the varied knob:
///   window-sweep  CBOW and random-window Skip-gram at r = 5, 10, 15, 20
///   lfw           plain CBOW against each of the four weight formulas
///   edws          random-window Skip-gram against the epoch-based schedule
std::vector<ExperimentArm> recipe_arms(std::string_view recipe, const TrainConfig& base);

ArmResult run_arm(const Corpus& corpus, std::span<const AnalogyQuestion> questions, const ExperimentArm& arm,
                  const EpochObserver& observer = {});

/// One line per arm: name, seed, semantic/syntactic/total correct, seconds.
void write_arm_summary(std::span<const ArmResult> results, std::ostream& out);

}  // namespace lfw2vec
