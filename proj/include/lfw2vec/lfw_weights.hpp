#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lfw2vec {

/// Distance-weight formula for CBOW context pooling.
///
///   PowerShared  lambda_i = |i|^-a + b
///   PowerSplit   lambda_i = |i|^-a0 + b0 (i < 0),  |i|^-a1 + b1 (i > 0)
///   ExpShared    lambda_i = exp(-a|i|) + b
///   ExpSplit     lambda_i = exp(-a0|i|) + b0 (i < 0),  exp(-a1|i|) + b1 (i > 0)
enum class LfwFormula { PowerShared, PowerSplit, ExpShared, ExpSplit };

/// "eq3".."eq6" on the command line and in sidecars.
std::string_view to_string(LfwFormula formula);
LfwFormula parse_lfw_formula(std::string_view text);

constexpr bool is_split(LfwFormula f) {
  return f == LfwFormula::PowerSplit || f == LfwFormula::ExpSplit;
}
constexpr bool is_power(LfwFormula f) {
  return f == LfwFormula::PowerShared || f == LfwFormula::PowerSplit;
}
constexpr int parameter_count(LfwFormula f) { return is_split(f) ? 4 : 2; }

/// Slot layout: shared {alpha, beta}; split {alpha0, beta0, alpha1, beta1}
/// where index 0/1 is the left side (i < 0) and 2/3 the right side.
using ParamVector = std::array<double, 4>;

struct LfwParams {
  LfwFormula formula = LfwFormula::PowerShared;
  ParamVector values{};  // all zero before training

  int count() const { return parameter_count(formula); }
  std::span<const double> active() const { return {values.data(), static_cast<std::size_t>(count())}; }
  std::span<double> active() { return {values.data(), static_cast<std::size_t>(count())}; }
  std::vector<std::string> names() const;
};

/// Lower bound applied to every weight so the normalizer stays positive.
inline constexpr double kWeightFloor = 1e-6;

/// Formula value before clamping. Requires 0 < |offset| <= window.
double raw_weight(const LfwParams& params, int offset, int window);

/// Clamped to kWeightFloor.
double weight(const LfwParams& params, int offset, int window);

/// d lambda / d param for each slot; slots of the inactive side (split
/// variants) and every slot of a clamped weight are zero.
ParamVector weight_gradients(const LfwParams& params, int offset, int window);

/// Weights and their parameter gradients for every offset in [-r, r] \ {0},
/// with prefix sums so that the normalizer over a truncated window is O(1).
class WeightVector {
 public:
  /// All weights 1: plain CBOW averaging.
  static WeightVector uniform(int window);
  WeightVector(const LfwParams& params, int window);

  int window() const noexcept { return window_; }
  double lambda(int offset) const { return lambda_[slot(offset)]; }
  const ParamVector& gradient(int offset) const { return grad_[slot(offset)]; }

  /// Z over offsets -left..-1 and 1..right.
  double normalization(int left, int right) const {
    return left_sum_[static_cast<std::size_t>(left)] + right_sum_[static_cast<std::size_t>(right)];
  }

 private:
  explicit WeightVector(int window);
  std::size_t slot(int offset) const { return static_cast<std::size_t>(offset + window_); }
  void finish();

  int window_;
  std::vector<double> lambda_;
  std::vector<ParamVector> grad_;
  std::vector<double> left_sum_;
  std::vector<double> right_sum_;
};

/// u_C = (1/Z) sum_j lambda_j u_j over the given rows. Summation runs in row
/// order, so all-ones weights reproduce the plain mean exactly.
template <class T>
void weighted_context(std::span<const T* const> rows, std::span<const double> lambdas, double z,
                      std::span<T> out) {
  for (auto& v : out) v = T(0);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const T lam = static_cast<T>(lambdas[j]);
    const T* row = rows[j];
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += lam * row[k];
  }
  const T inv = static_cast<T>(1.0 / z);
  for (auto& v : out) v *= inv;
}

/// dL/dp = g . du_C/dp with du_C/dp = (1/Z) sum_j (d lambda_j/dp)(u_j - u_C).
ParamVector context_gradient_wrt_params(std::span<const double> loss_grad,
                                        std::span<const std::span<const double>> rows,
                                        std::span<const double> lambdas,
                                        std::span<const ParamVector> lambda_grads);

struct CurvePoint {
  int distance = 0;
  double weight = 0.0;
  int side = 0;  // 0 shared, -1 left, +1 right
};

/// Weights at distances 1..r normalized to sum to 1 per curve. Split
/// formulas produce a left and a right curve.
std::vector<CurvePoint> export_weight_curve(const LfwParams& params, int window);

/// CSV with header `distance,weight` (shared) or `distance,weight,side`.
void write_weight_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out);

}  // namespace lfw2vec
