#include "focus/theory/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "focus/error.hpp"

namespace focus::theory {
namespace {

std::array<double, 3> softmax3(const ToyOutputs& y) {
  const double m = std::max({y.y0, y.y1, y.y2});
  std::array<double, 3> p{std::exp(y.y0 - m), std::exp(y.y1 - m), std::exp(y.y2 - m)};
  const double total = p[0] + p[1] + p[2];
  for (double& v : p) v /= total;
  return p;
}

void check_target(const ToyLoss& loss) {
  if ((loss.kind == ToyLossKind::kSinglePlus || loss.kind == ToyLossKind::kSingleMinus) &&
      loss.target > 2) {
    throw DomainError("single-class toy loss target must be 0, 1 or 2");
  }
}

}  // namespace

void ToyModel::validate() const {
  for (double v : x) {
    if (!(v >= 0.0)) throw DomainError("toy features must be non-negative");
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(c[i] > 0.0)) throw DomainError("class-specific coefficients c0..c2 must be positive");
  }
}

ToyOutputs toy_forward(const ToyModel& m) {
  return ToyOutputs{m.c[0] * m.x[0] + m.c[4] * m.x[3], m.c[1] * m.x[1] + m.c[5] * m.x[3],
                    m.c[2] * m.x[2] + m.c[6] * m.x[3]};
}

std::string describe(const ToyLoss& loss) {
  switch (loss.kind) {
    case ToyLossKind::kIfoUnweighted:
      return "ifo_unweighted";
    case ToyLossKind::kDofo:
      return "dofo";
    case ToyLossKind::kSinglePlus:
      return "single_plus(" + std::to_string(loss.target) + ")";
    case ToyLossKind::kSingleMinus:
      return "single_minus(" + std::to_string(loss.target) + ")";
    case ToyLossKind::kEntropy:
      return "entropy";
  }
  return "unknown";
}

GradReport toy_grad(const ToyModel& m, const ToyLoss& loss) {
  check_target(loss);
  GradReport r{loss, {}, 0.0};
  auto& dc = r.dc;
  const auto& x = m.x;
  const auto& c = m.c;
  switch (loss.kind) {
    case ToyLossKind::kIfoUnweighted:
      dc[0] = -x[0];
      dc[1] = -x[1];
      dc[4] = -x[3];
      dc[5] = -x[3];
      r.shared_pathway = -(c[4] + c[5]);
      break;
    case ToyLossKind::kDofo:
      dc[2] = x[2];
      dc[6] = x[3];
      r.shared_pathway = c[6];
      break;
    case ToyLossKind::kSinglePlus:
    case ToyLossKind::kSingleMinus: {
      const double sign = loss.kind == ToyLossKind::kSinglePlus ? 1.0 : -1.0;
      const std::size_t j = loss.target;
      dc[j] = sign * x[j];
      dc[4 + j] = sign * x[3];
      r.shared_pathway = sign * c[4 + j];
      break;
    }
    case ToyLossKind::kEntropy: {
      const auto p = softmax3(toy_forward(m));
      const auto g = entropy_coeffs(p);
      for (std::size_t j = 0; j < 3; ++j) {
        dc[j] = g[j] * x[j];
        dc[4 + j] = g[j] * x[3];
      }
      r.shared_pathway = g[0] * c[4] + g[1] * c[5] + g[2] * c[6];
      break;
    }
  }
  return r;
}

std::vector<double> entropy_coeffs(std::span<const double> probs) {
  if (probs.empty()) throw DomainError("empty probability vector");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("probabilities must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("probabilities must sum to 1");

  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  std::vector<double> g(probs.size(), 0.0);
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > 0.0) g[k] = probs[k] * (-h - std::log(probs[k]));
  }
  return g;
}

CoefficientRow coefficients_at(double p) {
  const double rest = std::max(0.0, 1.0 - 2.0 * p);
  const double probs[3] = {p, p, rest};
  const auto g = entropy_coeffs(probs);
  return CoefficientRow{p, 1.0, g[0], g[2]};
}

std::vector<CoefficientRow> coefficient_curve(std::size_t resolution) {
  if (resolution < 2) throw DomainError("coefficient_curve needs resolution >= 2");
  const double third = 1.0 / 3.0;
  const double step = (0.5 - third) / static_cast<double>(resolution - 1);
  const auto below = static_cast<std::ptrdiff_t>(resolution / 5);
  const auto last = static_cast<std::ptrdiff_t>(resolution) - 1;

  std::vector<CoefficientRow> rows;
  rows.reserve(resolution + resolution / 5);
  for (std::ptrdiff_t i = -below; i <= last; ++i) {
    const double p = i == last ? 0.5 : third + static_cast<double>(i) * step;
    rows.push_back(coefficients_at(p));
  }

  double max_alpha = 0.0, max_a = 0.0, max_b = 0.0;
  for (const auto& r : rows) {
    max_alpha = std::max(max_alpha, std::abs(r.alpha_ifo));
    max_a = std::max(max_a, std::abs(r.g_a));
    max_b = std::max(max_b, std::abs(r.g_b));
  }
  for (auto& r : rows) {
    if (max_alpha > 0.0) r.alpha_ifo /= max_alpha;
    if (max_a > 0.0) r.g_a /= max_a;
    if (max_b > 0.0) r.g_b /= max_b;
  }
  return rows;
}

AmplificationReport amplification_report(const ToyModel& m) {
  AmplificationReport r{};
  r.ifo_pathway = std::abs(toy_grad(m, {ToyLossKind::kIfoUnweighted}).shared_pathway);
  r.single_pathway = std::abs(toy_grad(m, {ToyLossKind::kSingleMinus, 0}).shared_pathway);
  r.entropy_pathway = std::abs(toy_grad(m, {ToyLossKind::kEntropy}).shared_pathway);
  r.dofo_pathway = std::abs(toy_grad(m, {ToyLossKind::kDofo}).shared_pathway);
  r.same_sign = (m.c[4] > 0.0 && m.c[5] > 0.0) || (m.c[4] < 0.0 && m.c[5] < 0.0);
  r.ifo_amplifies = r.ifo_pathway > r.single_pathway;
  return r;
}

std::vector<double> shared_feature_trajectory(ToyModel model, const ToyLoss& loss, double eta,
                                              std::size_t steps) {
  std::vector<double> out;
  out.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const GradReport g = toy_grad(model, loss);
    for (std::size_t i = 0; i < 7; ++i) model.c[i] -= eta * g.dc[i];
    model.x[3] -= eta * g.shared_pathway;
    out.push_back(model.x[3]);
  }
  return out;
}

void write_curve_csv(std::ostream& out, std::span<const CoefficientRow> rows) {
  out << "p,alpha_ifo,g_a,g_b\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.p, r.alpha_ifo, r.g_a, r.g_b);
    out << buf;
  }
}

}  // namespace focus::theory
