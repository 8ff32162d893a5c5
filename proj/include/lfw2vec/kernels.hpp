#pragma once

// Per-example negative-sampling updates shared by the trainer (float) and
// the gradient checks (double).

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lfw2vec/corpus.hpp"
#include "lfw2vec/lfw_weights.hpp"

namespace lfw2vec::kernels {

// 16 independent partial sums: two AVX or four SSE registers, enough to
// hide the add latency.
inline constexpr std::size_t kLanes = 16;

template <class T>
T reduce_lanes(const T* acc) {
  T half[8];
  for (std::size_t l = 0; l < 8; ++l) half[l] = acc[l] + acc[l + 8];
  return ((half[0] + half[1]) + (half[2] + half[3])) + ((half[4] + half[5]) + (half[6] + half[7]));
}

template <class T>
T dot(const T* __restrict a, const T* __restrict b, std::size_t n) {
  T acc[kLanes] = {};
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += a[k + l] * b[k + l];
  }
  for (; k < n; ++k) acc[k % kLanes] += a[k] * b[k];
  return reduce_lanes(acc);
}

/// y += a * x. x and y must not overlap.
template <class T>
void axpy(T a, const T* __restrict x, T* __restrict y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += a * x[k];
}

/// Returns x . y (pre-update y), then y += a * x. The update rounds exactly
/// like axpy. x and y must not overlap.
template <class T>
T dot_then_axpy(T a, const T* __restrict x, T* __restrict y, std::size_t n) {
  T acc[kLanes] = {};
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      acc[l] += x[k + l] * y[k + l];
      y[k + l] += a * x[k + l];
    }
  }
  for (; k < n; ++k) {
    acc[k % kLanes] += x[k] * y[k];
    y[k] += a * x[k];
  }
  return reduce_lanes(acc);
}

template <class T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

/// -log sigmoid(x), stable for large |x|.
inline double neg_log_sigmoid(double x) {
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

/// Row-major |V| x d view.
template <class T>
struct RowMatrix {
  T* data = nullptr;
  std::size_t dim = 0;

  T* row(WordId id) const { return data + static_cast<std::size_t>(id) * dim; }
};

struct CbowExample {
  WordId center = 0;
  std::span<const WordId> context;            // present context words
  std::span<const double> lambdas;            // one per context word
  std::span<const ParamVector> lambda_grads;  // empty: skip parameter gradients
  double z = 1.0;
  std::span<const WordId> negatives;
};

template <class T>
struct Scratch {
  std::vector<T> context;
  std::vector<T> grad;
  std::vector<const T*> rows;

  explicit Scratch(std::size_t dim = 0) : context(dim), grad(dim) {}
};

/// One CBOW position. Returns the negative-sampling loss
///   -log s(u_t . u_C) - sum_n log s(-u_n . u_C)
/// and applies SGD with step `lr` to the output rows and, scaled by
/// lambda_j / Z, to each context input row. When `param_grad` is given the
/// loss gradient wrt the weight parameters is added into it.
template <class T>
double cbow_step(RowMatrix<T> input, RowMatrix<T> output, const CbowExample& ex, T lr,
                 Scratch<T>& s, ParamVector* param_grad) {
  const std::size_t dim = input.dim;
  s.rows.clear();
  for (WordId w : ex.context) s.rows.push_back(input.row(w));
  weighted_context<T>(s.rows, ex.lambdas, ex.z, s.context);

  for (auto& g : s.grad) g = T(0);
  double loss = 0.0;
  auto score = [&](WordId word, bool positive) {
    T* out = output.row(word);
    const T f = dot(s.context.data(), out, dim);
    const T e = sigmoid(f) - (positive ? T(1) : T(0));
    loss += neg_log_sigmoid(positive ? static_cast<double>(f) : -static_cast<double>(f));
    axpy(e, out, s.grad.data(), dim);
    axpy(-lr * e, s.context.data(), out, dim);
  };
  score(ex.center, true);
  for (WordId n : ex.negatives) score(n, false);

  if (param_grad != nullptr && !ex.lambda_grads.empty()) {
    // Accumulate sum_j dl_j (g . u_j) and sum_j dl_j, then apply
    // (1/Z)(. - g . u_C) once.
    const double g_dot_context = static_cast<double>(dot(s.grad.data(), s.context.data(), dim));
    ParamVector weighted{}, total{};
    for (std::size_t j = 0; j < s.rows.size(); ++j) {
      const T scale = static_cast<T>(-static_cast<double>(lr) * ex.lambdas[j] / ex.z);
      T* row = input.row(ex.context[j]);
      const double g_dot_row = static_cast<double>(dot_then_axpy(scale, s.grad.data(), row, dim));
      const ParamVector& dl = ex.lambda_grads[j];
      for (std::size_t p = 0; p < dl.size(); ++p) {
        weighted[p] += dl[p] * g_dot_row;
        total[p] += dl[p];
      }
    }
    for (std::size_t p = 0; p < total.size(); ++p) {
      (*param_grad)[p] += (weighted[p] - total[p] * g_dot_context) / ex.z;
    }
  } else {
    for (std::size_t j = 0; j < s.rows.size(); ++j) {
      const T scale = static_cast<T>(-static_cast<double>(lr) * ex.lambdas[j] / ex.z);
      axpy(scale, s.grad.data(), input.row(ex.context[j]), dim);
    }
  }
  return loss;
}

/// One (center, context) Skip-gram pair: predicts `target` from the center's
/// input row against `negatives`. Returns the negative-sampling loss.
template <class T>
double skipgram_step(RowMatrix<T> input, RowMatrix<T> output, WordId center, WordId target,
                     std::span<const WordId> negatives, T lr, Scratch<T>& s) {
  const std::size_t dim = input.dim;
  T* hidden = input.row(center);
  for (auto& g : s.grad) g = T(0);
  double loss = 0.0;
  auto score = [&](WordId word, bool positive) {
    T* out = output.row(word);
    const T f = dot(hidden, out, dim);
    const T e = sigmoid(f) - (positive ? T(1) : T(0));
    loss += neg_log_sigmoid(positive ? static_cast<double>(f) : -static_cast<double>(f));
    axpy(e, out, s.grad.data(), dim);
    axpy(-lr * e, hidden, out, dim);
  };
  score(target, true);
  for (WordId n : negatives) score(n, false);
  axpy(-lr, s.grad.data(), hidden, dim);
  return loss;
}

}  // namespace lfw2vec::kernels
