#include "lfw2vec/lfw_weights.hpp"

#include <cstdlib>
#include <iomanip>
#include <ostream>

#include "lfw2vec/error.hpp"

namespace lfw2vec {

namespace {

void check_offset(int offset, int window) {
  if (offset == 0 || std::abs(offset) > window) {
    throw ConfigError("offset " + std::to_string(offset) + " outside window " + std::to_string(window));
  }
}

// Slot of alpha for the side `offset` falls on; beta is the next slot.
std::size_t alpha_slot(LfwFormula f, int offset) { return is_split(f) && offset > 0 ? 2 : 0; }

}  // namespace

std::string_view to_string(LfwFormula formula) {
  switch (formula) {
    case LfwFormula::PowerShared: return "eq3";
    case LfwFormula::PowerSplit: return "eq4";
    case LfwFormula::ExpShared: return "eq5";
    case LfwFormula::ExpSplit: return "eq6";
  }
  return "eq3";
}

LfwFormula parse_lfw_formula(std::string_view text) {
  if (text == "eq3" || text == "power-shared") return LfwFormula::PowerShared;
  if (text == "eq4" || text == "power-split") return LfwFormula::PowerSplit;
  if (text == "eq5" || text == "exp-shared") return LfwFormula::ExpShared;
  if (text == "eq6" || text == "exp-split") return LfwFormula::ExpSplit;
  throw ConfigError("unknown weight formula '" + std::string(text) + "'");
}

std::vector<std::string> LfwParams::names() const {
  if (is_split(formula)) return {"alpha0", "beta0", "alpha1", "beta1"};
  return {"alpha", "beta"};
}

double raw_weight(const LfwParams& params, int offset, int window) {
  check_offset(offset, window);
  const std::size_t a = alpha_slot(params.formula, offset);
  const double alpha = params.values[a];
  const double beta = params.values[a + 1];
  const double d = std::abs(offset);
  return is_power(params.formula) ? std::pow(d, -alpha) + beta : std::exp(-alpha * d) + beta;
}

double weight(const LfwParams& params, int offset, int window) {
  return std::max(raw_weight(params, offset, window), kWeightFloor);
}

ParamVector weight_gradients(const LfwParams& params, int offset, int window) {
  ParamVector grad{};
  if (raw_weight(params, offset, window) < kWeightFloor) return grad;
  const std::size_t a = alpha_slot(params.formula, offset);
  const double alpha = params.values[a];
  const double d = std::abs(offset);
  if (is_power(params.formula)) {
    grad[a] = -std::log(d) * std::pow(d, -alpha);
  } else {
    grad[a] = -d * std::exp(-alpha * d);
  }
  grad[a + 1] = 1.0;
  return grad;
}

WeightVector::WeightVector(int window)
    : window_(window),
      lambda_(2 * static_cast<std::size_t>(window) + 1, 0.0),
      grad_(2 * static_cast<std::size_t>(window) + 1, ParamVector{}),
      left_sum_(static_cast<std::size_t>(window) + 1, 0.0),
      right_sum_(static_cast<std::size_t>(window) + 1, 0.0) {
  if (window < 1) throw ConfigError("window must be >= 1");
}

WeightVector WeightVector::uniform(int window) {
  WeightVector w(window);
  for (int i = -window; i <= window; ++i) {
    if (i != 0) w.lambda_[w.slot(i)] = 1.0;
  }
  w.finish();
  return w;
}

WeightVector::WeightVector(const LfwParams& params, int window) : WeightVector(window) {
  for (int i = -window; i <= window; ++i) {
    if (i == 0) continue;
    lambda_[slot(i)] = weight(params, i, window);
    grad_[slot(i)] = weight_gradients(params, i, window);
  }
  finish();
}

void WeightVector::finish() {
  for (int d = 1; d <= window_; ++d) {
    const auto u = static_cast<std::size_t>(d);
    left_sum_[u] = left_sum_[u - 1] + lambda_[slot(-d)];
    right_sum_[u] = right_sum_[u - 1] + lambda_[slot(d)];
  }
}

ParamVector context_gradient_wrt_params(std::span<const double> loss_grad,
                                        std::span<const std::span<const double>> rows,
                                        std::span<const double> lambdas,
                                        std::span<const ParamVector> lambda_grads) {
  ParamVector out{};
  if (rows.empty()) return out;
  const std::size_t dim = loss_grad.size();
  double z = 0.0;
  for (double l : lambdas) z += l;

  std::vector<double> context(dim, 0.0);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != dim) throw ConfigError("context row dimension mismatch");
    for (std::size_t k = 0; k < dim; ++k) context[k] += lambdas[j] * rows[j][k];
  }
  for (double& v : context) v /= z;

  double g_dot_context = 0.0;
  for (std::size_t k = 0; k < dim; ++k) g_dot_context += loss_grad[k] * context[k];

  for (std::size_t j = 0; j < rows.size(); ++j) {
    double g_dot_row = 0.0;
    for (std::size_t k = 0; k < dim; ++k) g_dot_row += loss_grad[k] * rows[j][k];
    const double diff = (g_dot_row - g_dot_context) / z;
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += lambda_grads[j][p] * diff;
  }
  return out;
}

std::vector<CurvePoint> export_weight_curve(const LfwParams& params, int window) {
  if (window < 1) throw ConfigError("window must be >= 1");
  std::vector<CurvePoint> curve;
  auto emit = [&](int sign, int side) {
    const std::size_t first = curve.size();
    double total = 0.0;
    for (int d = 1; d <= window; ++d) {
      const double w = weight(params, sign * d, window);
      curve.push_back({d, w, side});
      total += w;
    }
    for (std::size_t i = first; i < curve.size(); ++i) curve[i].weight /= total;
  };
  if (is_split(params.formula)) {
    emit(-1, -1);
    emit(+1, +1);
  } else {
    emit(+1, 0);
  }
  return curve;
}

void write_weight_curve_csv(const std::vector<CurvePoint>& curve, std::ostream& out) {
  const bool sided = !curve.empty() && curve.front().side != 0;
  out << (sided ? "distance,weight,side\n" : "distance,weight\n");
  out << std::setprecision(17);
  for (const auto& p : curve) {
    out << p.distance << ',' << p.weight;
    if (sided) out << ',' << (p.side < 0 ? "left" : "right");
    out << '\n';
  }
  if (!out) throw IoError("failed writing weight curve");
}

}  // namespace lfw2vec
