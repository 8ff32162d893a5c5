#include "lfw2vec/trainer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <sstream>
#include <thread>

#include "lfw2vec/error.hpp"
#include "lfw2vec/kernels.hpp"

namespace lfw2vec {

namespace {

constexpr std::uint64_t kProgressBlock = 10000;

using Clock = std::chrono::steady_clock;

struct SharedState {
  const Corpus& corpus;
  const TrainConfig& config;
  const WindowSchedule schedule;
  const NegativeSampler sampler;
  const Subsampler subsampler;
  const LearningRateSchedule lr_schedule;
  kernels::RowMatrix<float> input;
  kernels::RowMatrix<float> output;
  std::array<std::atomic<double>, 4> params{};
  std::atomic<std::uint64_t> processed{0};
  std::atomic<bool> abort{false};
};

struct WorkerTotals {
  double loss = 0.0;
  std::uint64_t examples = 0;
};

LfwParams load_params(const SharedState& st) {
  LfwParams p;
  p.formula = *st.config.lfw;
  for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] = st.params[i].load(std::memory_order_relaxed);
  return p;
}

std::string describe_params(const std::optional<LfwParams>& p) {
  if (!p) return "";
  std::ostringstream os;
  os << std::setprecision(6);
  const auto names = p->names();
  for (std::size_t i = 0; i < names.size(); ++i) os << ' ' << names[i] << '=' << p->values[i];
  return os.str();
}

class Worker {
 public:
  Worker(SharedState& st, int epoch, int worker_index, std::size_t begin, std::size_t end)
      : st_(st),
        cfg_(st.config),
        epoch_(epoch),
        epoch_window_(epoch_window(st.schedule, epoch)),
        rng_(make_rng(cfg_.seed, epoch, worker_index)),
        scratch_(static_cast<std::size_t>(cfg_.dim)),
        negatives_(static_cast<std::size_t>(cfg_.negatives)),
        weights_(WeightVector::uniform(epoch_window_)) {
    const auto all = std::span<const WordId>(st.corpus.tokens);
    if (st.subsampler.enabled()) {
      st.subsampler.apply(all.subspan(begin, end - begin), rng_, local_);
      view_ = local_;
      begin_ = 0;
      end_ = local_.size();
    } else {
      view_ = all;
      begin_ = begin;
      end_ = end;
    }
    raw_tokens_ = end - begin;
    if (cfg_.lfw) {
      params_ = load_params(st_);
      weights_ = WeightVector(*params_, epoch_window_);
    }
    context_.reserve(2 * static_cast<std::size_t>(cfg_.window));
    lambdas_.reserve(context_.capacity());
    lambda_grads_.reserve(context_.capacity());
  }

  WorkerTotals run() {
    lr_ = st_.lr_schedule.at(st_.processed.load(std::memory_order_relaxed));
    std::uint64_t since_progress = 0;
    for (std::size_t pos = begin_; pos < end_; ++pos) {
      if (cfg_.model == ModelKind::Cbow) {
        cbow_position(pos);
      } else {
        skipgram_position(pos);
      }
      if (++since_progress == kProgressBlock) {
        report_progress(since_progress, pos);
        since_progress = 0;
        if (st_.abort.load(std::memory_order_relaxed)) break;
      }
    }
    report_progress(since_progress, end_ == begin_ ? begin_ : end_ - 1);
    flush_params();
    return totals_;
  }

 private:
  static Rng make_rng(std::uint64_t seed, int epoch, int worker) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(worker)};
    return Rng(seq);
  }

  int window_at_center() {
    return st_.schedule.strategy == WindowStrategy::RandomDynamic ? window_for_center(st_.schedule, rng_)
                                                                  : epoch_window_;
  }

  void cbow_position(std::size_t pos) {
    const ContextSpan span = context_span(pos, view_.size(), window_at_center());
    if (span.size() == 0) return;
    const bool learn = params_ && !cfg_.freeze_lfw;
    context_.clear();
    lambdas_.clear();
    lambda_grads_.clear();
    for (int i = -span.left; i <= span.right; ++i) {
      if (i == 0) continue;
      context_.push_back(view_[pos + static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i))]);
      lambdas_.push_back(weights_.lambda(i));
      if (learn) lambda_grads_.push_back(weights_.gradient(i));
    }
    const WordId center = view_[pos];
    st_.sampler.sample(center, rng_, negatives_);
    kernels::CbowExample ex;
    ex.center = center;
    ex.context = context_;
    ex.lambdas = lambdas_;
    ex.lambda_grads = lambda_grads_;
    ex.z = weights_.normalization(span.left, span.right);
    ex.negatives = negatives_;
    totals_.loss += kernels::cbow_step<float>(st_.input, st_.output, ex, static_cast<float>(lr_), scratch_,
                                              learn ? &param_grad_ : nullptr);
    ++totals_.examples;
    if (learn && ++since_flush_ >= cfg_.lfw_flush_interval) flush_params();
  }

  void skipgram_position(std::size_t pos) {
    const ContextSpan span = context_span(pos, view_.size(), window_at_center());
    const WordId center = view_[pos];
    for (int i = -span.left; i <= span.right; ++i) {
      if (i == 0) continue;
      const WordId target = view_[pos + static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i))];
      st_.sampler.sample(target, rng_, negatives_);
      totals_.loss += kernels::skipgram_step<float>(st_.input, st_.output, center, target, negatives_,
                                                    static_cast<float>(lr_), scratch_);
      ++totals_.examples;
    }
  }

  void flush_params() {
    if (!params_ || cfg_.freeze_lfw || since_flush_ == 0) return;
    const double step = cfg_.lfw_lr_scale * lr_;
    for (std::size_t p = 0; p < param_grad_.size(); ++p) {
      if (param_grad_[p] != 0.0) st_.params[p].fetch_add(-step * param_grad_[p], std::memory_order_relaxed);
    }
    param_grad_ = {};
    since_flush_ = 0;
    params_ = load_params(st_);
    for (double v : params_->values) {
      if (!std::isfinite(v)) diverged("non-finite weight parameter", 0);
    }
    weights_ = WeightVector(*params_, epoch_window_);
  }

  void report_progress(std::uint64_t count, std::size_t pos) {
    if (!std::isfinite(totals_.loss)) diverged("non-finite loss", pos);
    const double share = view_.empty() ? 0.0 : static_cast<double>(raw_tokens_) / static_cast<double>(end_ - begin_);
    const auto raw = static_cast<std::uint64_t>(std::llround(static_cast<double>(count) * (std::isfinite(share) ? share : 1.0)));
    const std::uint64_t done = st_.processed.fetch_add(raw, std::memory_order_relaxed) + raw;
    lr_ = st_.lr_schedule.at(done);
  }

  [[noreturn]] void diverged(const std::string& what, std::size_t pos) {
    std::ostringstream os;
    os << what << " in epoch " << epoch_ << " at position " << pos;
    if (pos < view_.size()) os << " (center '" << st_.corpus.vocab.word(view_[pos]) << "')";
    os << ", lr=" << lr_ << ", examples=" << totals_.examples << ", accumulated loss=" << totals_.loss
       << describe_params(params_);
    throw TrainingDiverged(os.str());
  }

  SharedState& st_;
  const TrainConfig& cfg_;
  int epoch_;
  int epoch_window_;
  Rng rng_;
  kernels::Scratch<float> scratch_;
  std::vector<WordId> negatives_;
  WeightVector weights_;
  std::optional<LfwParams> params_;
  ParamVector param_grad_{};
  int since_flush_ = 0;
  double lr_ = 0.0;

  std::vector<WordId> local_;
  std::span<const WordId> view_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  std::size_t raw_tokens_ = 0;

  std::vector<WordId> context_;
  std::vector<double> lambdas_;
  std::vector<ParamVector> lambda_grads_;
  WorkerTotals totals_;
};

}  // namespace

std::string_view to_string(ModelKind model) { return model == ModelKind::Cbow ? "cbow" : "skipgram"; }

ModelKind parse_model_kind(std::string_view text) {
  if (text == "cbow") return ModelKind::Cbow;
  if (text == "skipgram" || text == "skip-gram" || text == "sg") return ModelKind::SkipGram;
  throw ConfigError("unknown model '" + std::string(text) + "' (expected cbow or skipgram)");
}

double TrainConfig::initial_learning_rate() const {
  if (learning_rate > 0.0) return learning_rate;
  return model == ModelKind::Cbow ? 0.05 : 0.025;
}

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dimension must be >= 1");
  if (negatives < 1) throw ConfigError("negatives must be >= 1");
  if (learning_rate < 0.0 || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (lfw_flush_interval < 1) throw ConfigError("weight flush interval must be >= 1");
  if (!(lfw_lr_scale >= 0.0)) throw ConfigError("weight learning-rate scale must be >= 0");
  if (lfw && model != ModelKind::Cbow) throw ConfigError("learnable distance weights apply to CBOW only");
  schedule().validate();
}

EmbeddingMatrices::EmbeddingMatrices(std::size_t vocab_size_, int dim_, Rng& rng)
    : vocab_size(vocab_size_),
      dim(dim_),
      input(vocab_size_ * static_cast<std::size_t>(dim_)),
      output(vocab_size_ * static_cast<std::size_t>(dim_), 0.0f) {
  const double half = 0.5 / static_cast<double>(dim_);
  std::uniform_real_distribution<double> u(-half, half);
  for (float& v : input) v = static_cast<float>(u(rng));
}

std::string format_epoch_log(const EpochLog& log) {
  std::ostringstream os;
  os << "epoch " << log.epoch << " window " << log.window << " loss " << std::fixed << std::setprecision(6)
     << log.mean_loss << std::defaultfloat << describe_params(log.lfw) << " tokens/s " << std::fixed
     << std::setprecision(0) << log.tokens_per_sec;
  return os.str();
}

LearningRateSchedule::LearningRateSchedule(double initial, std::uint64_t total_work)
    : initial_(initial), total_(total_work) {
  if (!(initial > 0.0)) throw ConfigError("learning rate must be > 0");
}

double LearningRateSchedule::at(std::uint64_t processed) const {
  const double floor = initial_ * 1e-4;
  if (total_ == 0) return initial_;
  const double progress = static_cast<double>(processed) / static_cast<double>(total_);
  return std::max(initial_ * (1.0 - progress), floor);
}

TrainResult train(const Corpus& corpus, const TrainConfig& config, const EpochObserver& observer) {
  config.validate();
  if (corpus.vocab.empty() || corpus.tokens.empty()) throw ConfigError("empty corpus");

  Rng init_rng(config.seed);
  TrainResult result;
  result.matrices = EmbeddingMatrices(corpus.vocab.size(), config.dim, init_rng);

  SharedState st{corpus,
                 config,
                 config.schedule(),
                 NegativeSampler(corpus.vocab.counts(), config.distortion),
                 Subsampler(corpus.vocab, config.subsample),
                 LearningRateSchedule(config.initial_learning_rate(),
                                      static_cast<std::uint64_t>(config.epochs) * corpus.tokens.size()),
                 {result.matrices.input.data(), static_cast<std::size_t>(config.dim)},
                 {result.matrices.output.data(), static_cast<std::size_t>(config.dim)}};
  for (auto& p : st.params) p.store(0.0);

  const auto start = Clock::now();
  const std::size_t n = corpus.tokens.size();
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(config.threads), n));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    std::vector<WorkerTotals> totals(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto run_worker = [&](std::size_t w) {
      try {
        Worker worker(st, epoch, static_cast<int>(w), n * w / workers, n * (w + 1) / workers);
        totals[w] = worker.run();
      } catch (...) {
        errors[w] = std::current_exception();
        st.abort.store(true);
      }
    };
    if (workers == 1) {
      run_worker(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run_worker, w);
      for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    EpochLog log;
    log.epoch = epoch;
    log.window = epoch_window(st.schedule, epoch);
    double loss = 0.0;
    for (const auto& t : totals) {
      loss += t.loss;
      log.examples += t.examples;
    }
    log.mean_loss = log.examples > 0 ? loss / static_cast<double>(log.examples) : 0.0;
    if (config.lfw) log.lfw = load_params(st);
    log.seconds = std::chrono::duration<double>(Clock::now() - epoch_start).count();
    log.tokens_per_sec = log.seconds > 0.0 ? static_cast<double>(n) / log.seconds : 0.0;
    result.epochs.push_back(log);
    if (observer) observer(log);
  }

  if (config.lfw) result.lfw = load_params(st);
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

TrainResult train_cbow(const Corpus& corpus, const TrainConfig& config, const EpochObserver& observer) {
  if (config.model != ModelKind::Cbow) throw ConfigError("train_cbow requires model = cbow");
  return train(corpus, config, observer);
}

TrainResult train_skipgram(const Corpus& corpus, const TrainConfig& config, const EpochObserver& observer) {
  if (config.model != ModelKind::SkipGram) throw ConfigError("train_skipgram requires model = skipgram");
  return train(corpus, config, observer);
}

}  // namespace lfw2vec
