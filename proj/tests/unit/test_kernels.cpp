#include <doctest.h>

#include <cmath>
#include <random>

#include "lfw2vec/kernels.hpp"
#include "support/gradient_check.hpp"

using namespace lfw2vec;

TEST_CASE("dot and axpy against naive loops") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 31u, 128u}) {
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    double naive = 0;
    for (std::size_t k = 0; k < n; ++k) naive += a[k] * b[k];
    CHECK(kernels::dot(a.data(), b.data(), n) == doctest::Approx(naive).epsilon(1e-12));

    auto y1 = b, y2 = b;
    kernels::axpy(0.3, a.data(), y1.data(), n);
    const double d = kernels::dot_then_axpy(0.3, a.data(), y2.data(), n);
    CHECK(d == doctest::Approx(naive).epsilon(1e-12));
    CHECK(y1 == y2);
  }
}

TEST_CASE("stable -log sigmoid") {
  CHECK(kernels::neg_log_sigmoid(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(kernels::neg_log_sigmoid(800.0) == doctest::Approx(0.0));
  CHECK(kernels::neg_log_sigmoid(-800.0) == doctest::Approx(800.0));
}

TEST_CASE("CBOW step gradients match finite differences for every formula") {
  const LfwFormula formulas[] = {LfwFormula::PowerShared, LfwFormula::PowerSplit, LfwFormula::ExpShared,
                                 LfwFormula::ExpSplit};
  for (auto f : formulas) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto inst = testing::random_cbow_instance(f, seed * 31 + static_cast<std::uint64_t>(f));
      const auto stats = testing::check_cbow_gradients(inst);
      CHECK(stats.comparisons > 10);
      CHECK(stats.max_rel_err < 1e-4);
    }
  }
}

TEST_CASE("CBOW step without parameter gradients updates rows identically") {
  const auto inst = testing::random_cbow_instance(LfwFormula::PowerShared, 4);
  const LfwParams params{inst.formula, inst.params};
  std::vector<double> lambdas;
  std::vector<ParamVector> grads;
  double z = 0;
  for (int i : inst.offsets) {
    lambdas.push_back(weight(params, i, inst.window));
    grads.push_back(weight_gradients(params, i, inst.window));
    z += lambdas.back();
  }
  const std::size_t d = static_cast<std::size_t>(inst.dim);
  auto in1 = inst.input, out1 = inst.output, in2 = inst.input, out2 = inst.output;
  kernels::Scratch<double> s(d);
  kernels::CbowExample ex{inst.center, inst.context, lambdas, grads, z, inst.negatives};
  ParamVector pg{};
  kernels::cbow_step<double>({in1.data(), d}, {out1.data(), d}, ex, 0.05, s, &pg);
  ex.lambda_grads = {};
  kernels::cbow_step<double>({in2.data(), d}, {out2.data(), d}, ex, 0.05, s, nullptr);
  CHECK(in1 == in2);
  CHECK(out1 == out2);
}

TEST_CASE("Skip-gram pair gradients match finite differences") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const std::size_t d = 8;
  const int vocab = 8;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> in(vocab * d), out(vocab * d);
    for (auto& x : in) x = u(rng);
    for (auto& x : out) x = u(rng);
    const WordId center = 0, target = 1;
    const std::vector<WordId> negatives{2, 3, 4, 5, 6};
    auto loss = [&](const std::vector<double>& I, const std::vector<double>& O) {
      auto score = [&](WordId w) {
        double s = 0;
        for (std::size_t k = 0; k < d; ++k) s += I[k] * O[static_cast<std::size_t>(w) * d + k];
        return s;
      };
      double l = std::log1p(std::exp(-score(target)));
      for (WordId n : negatives) l += std::log1p(std::exp(score(n)));
      return l;
    };
    auto in2 = in, out2 = out;
    kernels::Scratch<double> s(d);
    const double got = kernels::skipgram_step<double>({in2.data(), d}, {out2.data(), d}, center, target, negatives, 1.0, s);
    CHECK(got == doctest::Approx(loss(in, out)).epsilon(1e-12));
    const double h = 1e-5;
    for (std::size_t k = 0; k < d; ++k) {
      auto up = in, down = in;
      up[k] += h;
      down[k] -= h;
      const double fd = (loss(up, out) - loss(down, out)) / (2 * h);
      CHECK(testing::relative_error(in[k] - in2[k], fd) < 1e-4);
    }
    for (WordId w : {1, 2, 3, 4, 5, 6}) {
      for (std::size_t k = 0; k < d; ++k) {
        const std::size_t at = static_cast<std::size_t>(w) * d + k;
        auto up = out, down = out;
        up[at] += h;
        down[at] -= h;
        const double fd = (loss(in, up) - loss(in, down)) / (2 * h);
        CHECK(testing::relative_error(out[at] - out2[at], fd) < 1e-4);
      }
    }
  }
}
