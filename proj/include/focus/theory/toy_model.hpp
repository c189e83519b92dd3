#pragma once

// Three-class, four-feature linear model used to reason about which features a
// focus loss reinforces:
//
//   y0 = c0 x0 + c4 x3,   y1 = c1 x1 + c5 x3,   y2 = c2 x2 + c6 x3
//
// x0..x2 are class-specific, x3 is shared by all outputs. Features are
// non-negative (they come out of a ReLU), c0..c2 are positive. c3 does not
// appear in any output and always has a zero partial derivative.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace focus::theory {

struct ToyModel {
  std::array<double, 7> c{};
  std::array<double, 4> x{};

  // Throws DomainError unless all x_i >= 0 and c0, c1, c2 > 0.
  void validate() const;
};

struct ToyOutputs {
  double y0, y1, y2;
};

ToyOutputs toy_forward(const ToyModel& model);

enum class ToyLossKind {
  kIfoUnweighted,  // -(y0 + y1)
  kDofo,           // y2
  kSinglePlus,     // +y_i
  kSingleMinus,    // -y_i
  kEntropy,        // H(softmax(y0, y1, y2))
};

struct ToyLoss {
  ToyLossKind kind;
  std::size_t target = 0;  // class index for the single-class losses
};

std::string describe(const ToyLoss& loss);

struct GradReport {
  ToyLoss loss;
  std::array<double, 7> dc{};
  // Factor multiplying d x3 / d z for an upstream activation z.
  double shared_pathway = 0.0;
};

// Closed-form partials. Throws DomainError for a single-class target > 2.
GradReport toy_grad(const ToyModel& model, const ToyLoss& loss);

// g_k = dH/dy_k = p_k (-H - log p_k); entries with p_k == 0 take their limit 0.
// Throws DomainError unless probs is a probability vector (non-negative,
// sums to 1 within 1e-9).
std::vector<double> entropy_coeffs(std::span<const double> probs);

struct CoefficientRow {
  double p;
  double alpha_ifo;
  double g_a;
  double g_b;
};

// Sweep with two classes at probability p and the third at 1 - 2p. The grid
// has step (1/2 - 1/3) / (resolution - 1), contains p = 1/3 and p = 1/2
// exactly, and extends resolution / 5 steps below 1/3. Each of the three
// coefficient columns is divided by its largest magnitude. Throws
// DomainError for resolution < 2.
std::vector<CoefficientRow> coefficient_curve(std::size_t resolution);

// The unscaled coefficients at p (two classes at p, one at 1 - 2p).
CoefficientRow coefficients_at(double p);

struct AmplificationReport {
  double ifo_pathway;     // |c4 + c5|
  double single_pathway;  // |c4|, loss -y0
  double entropy_pathway; // |g0 c4 + g1 c5 + g2 c6| at the model's own softmax
  double dofo_pathway;    // |c6|
  bool same_sign;         // c4 and c5 share a strict sign
  bool ifo_amplifies;     // ifo_pathway > single_pathway
};

AmplificationReport amplification_report(const ToyModel& model);

// Runs `steps` gradient steps of size eta on the coefficients and the shared
// feature x3 (treated as an upstream activation) and returns the x3 value
// after each step. Used to show the shared feature growing faster under the
// two-class loss than under the single-class loss.
std::vector<double> shared_feature_trajectory(ToyModel model, const ToyLoss& loss, double eta,
                                              std::size_t steps);

void write_curve_csv(std::ostream& out, std::span<const CoefficientRow> rows);

}  // namespace focus::theory
