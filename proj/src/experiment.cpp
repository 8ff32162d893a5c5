#include "lfw2vec/experiment.hpp"

#include <iomanip>
#include <ostream>

#include "lfw2vec/embeddings.hpp"
#include "lfw2vec/error.hpp"

namespace lfw2vec {

std::vector<ExperimentArm> recipe_arms(std::string_view recipe, const TrainConfig& base) {
  std::vector<ExperimentArm> arms;
  if (recipe == "window-sweep") {
    for (int r : {5, 10, 15, 20}) {
      TrainConfig cbow = base;
      cbow.model = ModelKind::Cbow;
      cbow.lfw.reset();
      cbow.window = r;
      arms.push_back({"cbow-r" + std::to_string(r), cbow});
    }
    for (int r : {5, 10, 15, 20}) {
      TrainConfig sg = base;
      sg.model = ModelKind::SkipGram;
      sg.lfw.reset();
      sg.window_strategy = WindowStrategy::RandomDynamic;
      sg.window = r;
      arms.push_back({"skipgram-r" + std::to_string(r), sg});
    }
  } else if (recipe == "lfw") {
    TrainConfig cbow = base;
    cbow.model = ModelKind::Cbow;
    cbow.lfw.reset();
    arms.push_back({"cbow", cbow});
    for (auto f : {LfwFormula::PowerShared, LfwFormula::PowerSplit, LfwFormula::ExpShared, LfwFormula::ExpSplit}) {
      TrainConfig weighted = cbow;
      weighted.lfw = f;
      arms.push_back({"lfw-cbow-" + std::string(to_string(f)), weighted});
    }
  } else if (recipe == "edws") {
    TrainConfig sg = base;
    sg.model = ModelKind::SkipGram;
    sg.lfw.reset();
    sg.window_strategy = WindowStrategy::RandomDynamic;
    arms.push_back({"skipgram", sg});
    sg.window_strategy = WindowStrategy::EpochBased;
    arms.push_back({"edws-skipgram", sg});
  } else {
    throw ConfigError("unknown recipe '" + std::string(recipe) + "' (expected window-sweep, lfw or edws)");
  }
  return arms;
}

ArmResult run_arm(const Corpus& corpus, std::span<const AnalogyQuestion> questions, const ExperimentArm& arm,
                  const EpochObserver& observer) {
  TrainResult trained = train(corpus, arm.config, observer);
  ArmResult result;
  result.name = arm.name;
  result.config = arm.config;
  result.seed = arm.config.seed;
  result.lfw = trained.lfw;
  result.train_seconds = trained.seconds;
  const AnalogySolver solver(make_embeddings(corpus.vocab, trained.matrices));
  result.report = evaluate(solver, questions, arm.config.threads);
  return result;
}

void write_arm_summary(std::span<const ArmResult> results, std::ostream& out) {
  out << std::left << std::setw(20) << "arm" << std::right << std::setw(8) << "seed" << std::setw(10) << "semantic"
      << std::setw(11) << "syntactic" << std::setw(8) << "total" << std::setw(10) << "seconds" << '\n';
  for (const auto& r : results) {
    out << std::left << std::setw(20) << r.name << std::right << std::setw(8) << r.seed << std::setw(10)
        << r.report.semantic.correct << std::setw(11) << r.report.syntactic.correct << std::setw(8)
        << r.report.overall.correct << std::setw(10) << std::fixed << std::setprecision(1) << r.train_seconds
        << std::defaultfloat << '\n';
  }
}

}  // namespace lfw2vec
