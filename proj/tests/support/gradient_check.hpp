#pragma once

// End-to-end finite-difference check of one CBOW negative-sampling step.
// The loss oracle below re-derives weights, pooling and loss from scratch;
// the analytic side is the trainer's kernel run in double precision with a
// unit step, so each row gradient is simply (before - after).

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lfw2vec/kernels.hpp"
#include "lfw2vec/lfw_weights.hpp"

namespace lfw2vec::testing {

struct GradCheckStats {
  double max_rel_err = 0.0;
  int comparisons = 0;
};

inline double oracle_lambda(LfwFormula f, const ParamVector& v, int offset) {
  const bool right = offset > 0;
  const bool split = f == LfwFormula::PowerSplit || f == LfwFormula::ExpSplit;
  const double a = split && right ? v[2] : v[0];
  const double b = split && right ? v[3] : v[1];
  const double d = std::abs(offset);
  const bool power = f == LfwFormula::PowerShared || f == LfwFormula::PowerSplit;
  return (power ? std::pow(d, -a) : std::exp(-a * d)) + b;
}

struct CbowInstance {
  LfwFormula formula;
  ParamVector params{};
  int dim = 8;
  int window = 5;
  std::vector<int> offsets;
  std::vector<WordId> context;
  WordId center = 0;
  std::vector<WordId> negatives;
  std::vector<double> input;   // vocab x dim
  std::vector<double> output;  // vocab x dim

  double loss(const ParamVector& p, const std::vector<double>& in, const std::vector<double>& out) const {
    const auto d = static_cast<std::size_t>(dim);
    std::vector<double> uc(d, 0.0);
    double z = 0.0;
    for (std::size_t j = 0; j < context.size(); ++j) {
      const double l = oracle_lambda(formula, p, offsets[j]);
      z += l;
      for (std::size_t k = 0; k < d; ++k) uc[k] += l * in[static_cast<std::size_t>(context[j]) * d + k];
    }
    for (double& x : uc) x /= z;
    auto score = [&](WordId w) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += uc[k] * out[static_cast<std::size_t>(w) * d + k];
      return s;
    };
    auto softplus = [](double x) { return std::log1p(std::exp(x)); };
    double l = softplus(-score(center));
    for (WordId n : negatives) l += softplus(score(n));
    return l;
  }
};

inline CbowInstance random_cbow_instance(LfwFormula f, std::uint64_t seed, int dim = 8, int window = 5,
                                         int negatives = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5), alpha(-1.0, 2.0), beta(0.0, 1.0);
  std::uniform_int_distribution<int> side(0, window);
  CbowInstance inst;
  inst.formula = f;
  inst.dim = dim;
  inst.window = window;
  inst.params = {alpha(rng), beta(rng), alpha(rng), beta(rng)};
  int left = side(rng), right = side(rng);
  if (left + right == 0) right = 1;
  for (int i = -left; i <= right; ++i) {
    if (i != 0) inst.offsets.push_back(i);
  }
  // Distinct words everywhere so that every row receives exactly one update.
  const int vocab = static_cast<int>(inst.offsets.size()) + 1 + negatives;
  std::vector<WordId> ids(static_cast<std::size_t>(vocab));
  for (int i = 0; i < vocab; ++i) ids[static_cast<std::size_t>(i)] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  std::size_t next = 0;
  for (std::size_t j = 0; j < inst.offsets.size(); ++j) inst.context.push_back(ids[next++]);
  inst.center = ids[next++];
  for (int n = 0; n < negatives; ++n) inst.negatives.push_back(ids[next++]);
  inst.input.resize(static_cast<std::size_t>(vocab * dim));
  inst.output.resize(static_cast<std::size_t>(vocab * dim));
  for (double& x : inst.input) x = u(rng);
  for (double& x : inst.output) x = u(rng);
  return inst;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

/// Compares kernel gradients wrt every active weight parameter and every
/// touched embedding entry against central differences of the oracle loss.
inline GradCheckStats check_cbow_gradients(const CbowInstance& inst, double h = 1e-5) {
  GradCheckStats stats;
  auto note = [&](double analytic, double numeric) {
    stats.max_rel_err = std::max(stats.max_rel_err, relative_error(analytic, numeric));
    ++stats.comparisons;
  };

  const LfwParams params{inst.formula, inst.params};
  std::vector<double> lambdas;
  std::vector<ParamVector> lambda_grads;
  for (int i : inst.offsets) {
    lambdas.push_back(weight(params, i, inst.window));
    lambda_grads.push_back(weight_gradients(params, i, inst.window));
  }
  double z = 0.0;
  for (double l : lambdas) z += l;

  auto in = inst.input;
  auto out = inst.output;
  const auto d = static_cast<std::size_t>(inst.dim);
  kernels::Scratch<double> scratch(d);
  kernels::CbowExample ex;
  ex.center = inst.center;
  ex.context = inst.context;
  ex.lambdas = lambdas;
  ex.lambda_grads = lambda_grads;
  ex.z = z;
  ex.negatives = inst.negatives;
  ParamVector param_grad{};
  const double kernel_loss =
      kernels::cbow_step<double>({in.data(), d}, {out.data(), d}, ex, 1.0, scratch, &param_grad);
  const double oracle_loss = inst.loss(inst.params, inst.input, inst.output);
  note(kernel_loss, oracle_loss);

  for (int p = 0; p < params.count(); ++p) {
    auto up = inst.params, down = inst.params;
    up[static_cast<std::size_t>(p)] += h;
    down[static_cast<std::size_t>(p)] -= h;
    const double fd = (inst.loss(up, inst.input, inst.output) - inst.loss(down, inst.input, inst.output)) / (2 * h);
    note(param_grad[static_cast<std::size_t>(p)], fd);
  }

  auto check_rows = [&](const std::vector<WordId>& words, bool input_side) {
    for (WordId w : words) {
      for (std::size_t k = 0; k < d; ++k) {
        const std::size_t at = static_cast<std::size_t>(w) * d + k;
        auto up = input_side ? inst.input : inst.output;
        auto down = up;
        up[at] += h;
        down[at] -= h;
        const double fd = input_side
                              ? (inst.loss(inst.params, up, inst.output) - inst.loss(inst.params, down, inst.output))
                              : (inst.loss(inst.params, inst.input, up) - inst.loss(inst.params, inst.input, down));
        const double analytic = input_side ? inst.input[at] - in[at] : inst.output[at] - out[at];
        note(analytic, fd / (2 * h));
      }
    }
  };
  check_rows(inst.context, true);
  std::vector<WordId> outputs{inst.center};
  outputs.insert(outputs.end(), inst.negatives.begin(), inst.negatives.end());
  check_rows(outputs, false);
  return stats;
}

}  // namespace lfw2vec::testing
