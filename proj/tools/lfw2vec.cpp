#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "lfw2vec/corpus.hpp"
#include "lfw2vec/embeddings.hpp"
#include "lfw2vec/error.hpp"
#include "lfw2vec/evaluator.hpp"
#include "lfw2vec/experiment.hpp"
#include "lfw2vec/lfw_weights.hpp"
#include "lfw2vec/model_io.hpp"
#include "lfw2vec/trainer.hpp"

using namespace lfw2vec;
namespace fs = std::filesystem;

namespace {

struct TrainArgs {
  std::string model = "cbow";
  std::string lfw = "none";
  std::string window_strategy;  // empty: fixed for CBOW, random for Skip-gram
  bool freeze_lfw = false;
  std::int64_t min_count = kDefaultDiscardAtMost;
  TrainConfig config;
};

void add_train_options(CLI::App& cmd, TrainArgs& a) {
  cmd.add_option("--model", a.model, "cbow or skipgram")->check(CLI::IsMember({"cbow", "skipgram"}));
  cmd.add_option("--lfw", a.lfw, "learnable weights for CBOW")
      ->check(CLI::IsMember({"none", "eq3", "eq4", "eq5", "eq6"}));
  cmd.add_option("--window-strategy", a.window_strategy, "fixed, random or edws (default: fixed for CBOW, random for Skip-gram)")
      ->check(CLI::IsMember({"fixed", "random", "edws"}));
  cmd.add_option("--window", a.config.window, "maximum window size r")->capture_default_str();
  cmd.add_option("--epochs", a.config.epochs, "epochs K")->capture_default_str();
  cmd.add_option("--edws-phases", a.config.edws_phases, "EDWS phases P")->capture_default_str();
  cmd.add_option("--dim", a.config.dim, "embedding dimension")->capture_default_str();
  cmd.add_option("--negatives", a.config.negatives, "negative samples per prediction")->capture_default_str();
  cmd.add_option("--lr", a.config.learning_rate, "initial learning rate (default 0.05 CBOW, 0.025 Skip-gram)");
  cmd.add_option("--threads", a.config.threads, "worker threads")->capture_default_str();
  cmd.add_option("--seed", a.config.seed, "random seed")->capture_default_str();
  cmd.add_option("--subsample", a.config.subsample, "subsampling threshold, 0 disables")->capture_default_str();
  cmd.add_option("--min-count", a.min_count, "discard words seen at most this many times")->capture_default_str();
  cmd.add_flag("--freeze-lfw", a.freeze_lfw, "keep weight parameters at zero");
}

TrainConfig finish_config(const TrainArgs& a) {
  TrainConfig c = a.config;
  c.model = parse_model_kind(a.model);
  if (a.lfw != "none") c.lfw = parse_lfw_formula(a.lfw);
  c.freeze_lfw = a.freeze_lfw;
  if (!a.window_strategy.empty()) {
    c.window_strategy = parse_window_strategy(a.window_strategy);
  } else {
    c.window_strategy = c.model == ModelKind::Cbow ? WindowStrategy::Fixed : WindowStrategy::RandomDynamic;
  }
  c.validate();
  return c;
}

ModelFormat format_for_path(const fs::path& path) {
  const auto ext = path.extension().string();
  return ext == ".txt" || ext == ".vec" ? ModelFormat::Text : ModelFormat::Binary;
}

fs::path sidecar_path(const fs::path& model) { return fs::path(model.string() + ".json"); }

int cmd_vocab(const std::string& input, const std::string& output, std::int64_t min_count) {
  const auto vocab = build_vocabulary(fs::path(input), min_count);
  if (output.empty() || output == "-") {
    save_vocabulary(vocab, std::cout);
  } else {
    std::ofstream out(output);
    if (!out) throw IoError("cannot write " + output);
    save_vocabulary(vocab, out);
  }
  std::cerr << "vocabulary: " << vocab.size() << " words, " << vocab.total_tokens() << " tokens\n";
  return 0;
}

int cmd_train(const TrainArgs& args, const std::string& input, const std::string& output, const std::string& format,
              const std::string& vocab_out, const std::string& curve_out) {
  const TrainConfig config = finish_config(args);
  const Corpus corpus = load_corpus(input, args.min_count);
  std::cerr << "corpus: " << corpus.tokens.size() << " tokens, vocabulary " << corpus.vocab.size() << "\n";
  if (!vocab_out.empty()) {
    std::ofstream out(vocab_out);
    if (!out) throw IoError("cannot write " + vocab_out);
    save_vocabulary(corpus.vocab, out);
  }
  const auto result = train(corpus, config, [](const EpochLog& log) { std::cout << format_epoch_log(log) << std::endl; });
  const ModelFormat fmt = format.empty() ? format_for_path(output) : parse_model_format(format);
  save_model(make_embeddings(corpus.vocab, result.matrices), output, fmt);

  Sidecar sidecar;
  sidecar.config = config;
  sidecar.lfw = result.lfw;
  sidecar.vocab_size = corpus.vocab.size();
  sidecar.corpus_tokens = static_cast<std::int64_t>(corpus.tokens.size());
  sidecar.corpus = input;
  save_sidecar(sidecar, sidecar_path(output));

  if (!curve_out.empty()) {
    if (!result.lfw) throw ConfigError("--curve-out needs --lfw");
    std::ofstream out(curve_out);
    if (!out) throw IoError("cannot write " + curve_out);
    write_weight_curve_csv(export_weight_curve(*result.lfw, config.window), out);
  }
  std::cerr << "saved " << output << " (" << result.seconds << " s)\n";
  return 0;
}

int cmd_eval(const std::string& model, const std::string& questions, const std::string& format, int threads) {
  const auto embeddings = load_model(model);
  const auto qs = load_questions(fs::path(questions));
  const AnalogySolver solver(embeddings);
  write_report(evaluate(solver, qs, threads), parse_report_format(format), std::cout);
  return 0;
}

int cmd_convert(const std::string& in, const std::string& out, const std::string& format) {
  save_model(load_model(in), out, parse_model_format(format));
  // Keep the run metadata with the converted file.
  if (fs::exists(sidecar_path(in)) && !fs::exists(sidecar_path(out))) {
    fs::copy_file(sidecar_path(in), sidecar_path(out));
  }
  return 0;
}

int cmd_curve(const std::string& sidecar_file, int window, const std::string& output) {
  const auto sidecar = load_sidecar(fs::path(sidecar_file));
  if (!sidecar.lfw) throw ConfigError(sidecar_file + " has no learned weight parameters");
  const int r = window > 0 ? window : sidecar.config.window;
  const auto curve = export_weight_curve(*sidecar.lfw, r);
  if (output.empty() || output == "-") {
    write_weight_curve_csv(curve, std::cout);
  } else {
    std::ofstream out(output);
    if (!out) throw IoError("cannot write " + output);
    write_weight_curve_csv(curve, out);
  }
  return 0;
}

int cmd_experiment(const TrainArgs& args, const std::string& recipe, const std::string& input,
                   const std::string& questions, const std::vector<std::uint64_t>& seeds) {
  const TrainConfig base = finish_config(args);
  const Corpus corpus = load_corpus(input, args.min_count);
  const auto qs = load_questions(fs::path(questions));
  std::vector<ArmResult> results;
  for (auto seed : seeds) {
    for (auto arm : recipe_arms(recipe, base)) {
      arm.config.seed = seed;
      std::cout << "# " << arm.name << " seed " << seed << std::endl;
      results.push_back(run_arm(corpus, qs, arm, [](const EpochLog& log) {
        std::cout << format_epoch_log(log) << std::endl;
      }));
    }
  }
  write_arm_summary(results, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lfw2vec: CBOW / Skip-gram with learnable formulated weights and epoch-based windows"};
  app.require_subcommand(1);

  std::string input, output, format, vocab_out, curve_out, model, questions, recipe, sidecar;
  std::int64_t min_count = kDefaultDiscardAtMost;
  int threads = 1, window = 0;
  std::vector<std::uint64_t> seeds{1};
  TrainArgs train_args;
  TrainArgs exp_args;

  auto* vocab = app.add_subcommand("vocab", "export the vocabulary as 'word count' lines");
  vocab->add_option("--input", input, "corpus")->required();
  vocab->add_option("--output", output, "destination (default stdout)");
  vocab->add_option("--min-count", min_count, "discard words seen at most this many times")->capture_default_str();

  auto* train_cmd = app.add_subcommand("train", "train embeddings");
  add_train_options(*train_cmd, train_args);
  train_cmd->add_option("--input", input, "corpus")->required();
  train_cmd->add_option("--output", output, "model file; metadata goes to OUTPUT.json")->required();
  train_cmd->add_option("--format", format, "text or bin (default from extension: .txt/.vec text, else bin)")
      ->check(CLI::IsMember({"text", "bin"}));
  train_cmd->add_option("--vocab-out", vocab_out, "also export the vocabulary");
  train_cmd->add_option("--curve-out", curve_out, "also export the learned weight curve as CSV");

  auto* eval = app.add_subcommand("eval", "analogy evaluation");
  eval->add_option("--model", model, "model file (text or bin)")->required();
  eval->add_option("--questions", questions, "question file")->required();
  std::string report_format = "table";
  eval->add_option("--format", report_format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  eval->add_option("--threads", threads, "worker threads")->capture_default_str();

  auto* convert = app.add_subcommand("convert", "convert between model formats");
  std::string conv_in, conv_out, conv_format;
  convert->add_option("--in", conv_in, "source model")->required();
  convert->add_option("--out", conv_out, "destination")->required();
  convert->add_option("--format", conv_format, "text or bin")->required()->check(CLI::IsMember({"text", "bin"}));

  auto* curve = app.add_subcommand("curve", "export the learned weight curve as CSV");
  curve->add_option("--sidecar", sidecar, "metadata file written by train (MODEL.json)")->required();
  curve->add_option("--window", window, "distances 1..R (default: training window)");
  curve->add_option("--output", output, "destination (default stdout)");

  auto* experiment = app.add_subcommand("experiment", "run a comparison recipe and print a summary");
  add_train_options(*experiment, exp_args);
  experiment->add_option("--recipe", recipe, "window-sweep, lfw or edws")
      ->required()
      ->check(CLI::IsMember({"window-sweep", "lfw", "edws"}));
  experiment->add_option("--input", input, "corpus")->required();
  experiment->add_option("--questions", questions, "question file")->required();
  experiment->add_option("--seeds", seeds, "one run per seed")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*vocab) return cmd_vocab(input, output, min_count);
    if (*train_cmd) return cmd_train(train_args, input, output, format, vocab_out, curve_out);
    if (*eval) return cmd_eval(model, questions, report_format, threads);
    if (*convert) return cmd_convert(conv_in, conv_out, conv_format);
    if (*curve) return cmd_curve(sidecar, window, output);
    if (*experiment) return cmd_experiment(exp_args, recipe, input, questions, seeds);
  } catch (const TrainingDiverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
