#pragma once

// Uncertainty-gated test-time refinement of a single prediction.
//
// A sample is refined only when the gap between its two most likely classes
// is below a threshold. The model is then cloned, nudged by T gradient steps
// on a loss over the logits of the n_f most likely ("focus") classes, and the
// refined argmax is returned. The caller's parameters are restored afterwards.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "focus/grad/tape.hpp"
#include "focus/net/parameters.hpp"

namespace focus::refine {

enum class LossKind {
  kIfo,      // raise focus-class logits: -sum_{c in F} p_c f_c
  kDofo,     // lower out-of-focus logits: mean_{c not in F} f_c
  kEntropy,  // Shannon entropy of the softmax
  kCeFocus,  // cross-entropy averaged over the focus classes
};

std::string_view to_string(LossKind kind);
// Accepts ifo, dofo, entropy, ce_focus. Throws DomainError otherwise.
LossKind parse_loss_kind(std::string_view name);

struct FocusConfig {
  double eta = 0.0;
  std::size_t iterations = 1;
  std::size_t focus_count = 2;
  double gap_threshold = 0.16;
  LossKind loss = LossKind::kIfo;
  // Probability weights for ifo and ce_focus; ignored by dofo and entropy.
  bool weighted = true;
  // Global gradient-norm clip applied before every step; 0 disables.
  double clip_norm = 1.0;

  // Throws DomainError when a field is out of range for num_classes classes.
  void validate(std::size_t num_classes) const;
};

struct FocusOutcome {
  bool gated = false;
  bool diverged = false;
  std::size_t original_prediction = 0;
  std::size_t refined_prediction = 0;
  double delta12 = 0.0;
  std::vector<std::size_t> focus_set;
  // Loss at the unmodified parameters; 0 when gated.
  double loss_value = 0.0;
  std::size_t steps_run = 0;
};

// p_m(1) - p_m(2). Throws DomainError for fewer than 2 classes.
double uncertainty_gap(std::span<const double> probs);

// All class indices, most probable first, ties broken by lower index.
std::vector<std::size_t> rank_classes(std::span<const double> probs);

// The n_f most probable classes in rank order. Throws DomainError if n_f > |C|.
std::vector<std::size_t> select_focus(std::span<const double> probs, std::size_t n_f);

// Loss builders. probs_detached enter as constants, so no gradient flows
// through them.
grad::NodeId loss_ifo(grad::Tape& tape, grad::NodeId logits,
                      std::span<const double> probs_detached,
                      std::span<const std::size_t> focus, bool weighted);
// Throws DomainError when focus covers every class.
grad::NodeId loss_dofo(grad::Tape& tape, grad::NodeId logits,
                       std::span<const std::size_t> focus, std::size_t num_classes);
grad::NodeId loss_entropy(grad::Tape& tape, grad::NodeId logits);
grad::NodeId loss_ce_focus(grad::Tape& tape, grad::NodeId logits,
                           std::span<const std::size_t> focus,
                           std::span<const double> probs_detached, bool weighted);

// Dispatches on config.loss.
grad::NodeId build_loss(grad::Tape& tape, grad::NodeId logits,
                        std::span<const double> probs_detached,
                        std::span<const std::size_t> focus, const FocusConfig& config);

// Runs the gated refinement. params is modified during the call and restored
// bit for bit before returning, including on exceptions.
FocusOutcome focus_predict(net::Parameters& params, std::span<const double> input,
                           const FocusConfig& config);

// First step of focus_predict without applying it: the gate decision, focus
// set and the clipped loss gradient at params. grad is empty when gated.
struct FocusStep {
  FocusOutcome outcome;
  grad::GradVector grad;
};
FocusStep focus_gradient(const net::Parameters& params, std::span<const double> input,
                         const FocusConfig& config);

}  // namespace focus::refine
