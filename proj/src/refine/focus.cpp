#include "focus/refine/focus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "focus/error.hpp"
#include "focus/grad/mlp_forward.hpp"
#include "focus/net/mlp.hpp"

namespace focus::refine {
namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_focus(std::span<const std::size_t> focus, std::size_t num_classes) {
  if (focus.empty()) throw DomainError("focus set is empty");
  for (std::size_t c : focus) {
    if (c >= num_classes) throw DomainError("focus class out of range");
  }
}

// Restores the caller's parameters however the refinement exits.
class RestoreOnExit {
 public:
  explicit RestoreOnExit(net::Parameters& params) : params_(params), snap_(params) {}
  ~RestoreOnExit() { net::restore(params_, snap_); }
  RestoreOnExit(const RestoreOnExit&) = delete;
  RestoreOnExit& operator=(const RestoreOnExit&) = delete;

 private:
  net::Parameters& params_;
  net::Snapshot snap_;
};

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kIfo:
      return "ifo";
    case LossKind::kDofo:
      return "dofo";
    case LossKind::kEntropy:
      return "entropy";
    case LossKind::kCeFocus:
      return "ce_focus";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "ifo") return LossKind::kIfo;
  if (name == "dofo") return LossKind::kDofo;
  if (name == "entropy") return LossKind::kEntropy;
  if (name == "ce_focus") return LossKind::kCeFocus;
  throw DomainError("unknown loss kind: " + std::string(name));
}

void FocusConfig::validate(std::size_t num_classes) const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("eta must be finite and >= 0");
  if (iterations < 1) throw DomainError("iterations must be >= 1");
  if (!(gap_threshold >= 0.0 && gap_threshold <= 1.0)) throw DomainError("d12 must lie in [0, 1]");
  if (!(clip_norm >= 0.0)) throw DomainError("clip_norm must be >= 0");
  if (focus_count < 2) throw DomainError("n_f must be >= 2");
  if (loss == LossKind::kDofo) {
    if (focus_count >= num_classes) throw DomainError("dofo needs n_f < number of classes");
  } else if (focus_count > num_classes) {
    throw DomainError("n_f exceeds the number of classes");
  }
}

double uncertainty_gap(std::span<const double> probs) {
  if (probs.size() < 2) throw DomainError("uncertainty gap needs at least 2 classes");
  double first = -INFINITY, second = -INFINITY;
  for (double p : probs) {
    if (p > first) {
      second = first;
      first = p;
    } else if (p > second) {
      second = p;
    }
  }
  return first - second;
}

std::vector<std::size_t> rank_classes(std::span<const double> probs) {
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  return order;
}

std::vector<std::size_t> select_focus(std::span<const double> probs, std::size_t n_f) {
  if (n_f > probs.size()) throw DomainError("n_f exceeds the number of classes");
  auto order = rank_classes(probs);
  order.resize(n_f);
  return order;
}

grad::NodeId loss_ifo(grad::Tape& tape, grad::NodeId logits,
                      std::span<const double> probs_detached,
                      std::span<const std::size_t> focus, bool weighted) {
  const std::size_t k = tape.value(logits).size();
  check_focus(focus, k);
  std::vector<double> w(k, 0.0);
  for (std::size_t c : focus) {
    w[c] = weighted ? -probs_detached[c] : -1.0 / static_cast<double>(focus.size());
  }
  return tape.dot_const(logits, w);
}

grad::NodeId loss_dofo(grad::Tape& tape, grad::NodeId logits,
                       std::span<const std::size_t> focus, std::size_t num_classes) {
  if (tape.value(logits).size() != num_classes) throw ShapeError("logit count differs from num_classes");
  check_focus(focus, num_classes);
  std::vector<double> w(num_classes, 1.0);
  for (std::size_t c : focus) w[c] = 0.0;
  const auto out = static_cast<std::size_t>(std::count(w.begin(), w.end(), 1.0));
  if (out == 0) throw DomainError("dofo needs at least one out-of-focus class");
  for (double& v : w) v /= static_cast<double>(out);
  return tape.dot_const(logits, w);
}

grad::NodeId loss_entropy(grad::Tape& tape, grad::NodeId logits) {
  // H = -sum_k p_k log p_k with log p = z - logsumexp(z); never evaluates log(0).
  const auto lse = tape.logsumexp(logits);
  const auto log_p = tape.sub_scalar(logits, lse);
  const auto p = tape.exp(log_p);
  return tape.scale(tape.sum(tape.mul(p, log_p)), -1.0);
}

grad::NodeId loss_ce_focus(grad::Tape& tape, grad::NodeId logits,
                           std::span<const std::size_t> focus,
                           std::span<const double> probs_detached, bool weighted) {
  const std::size_t k = tape.value(logits).size();
  check_focus(focus, k);
  std::vector<double> w(k, 0.0);
  for (std::size_t c : focus) {
    w[c] = weighted ? probs_detached[c] : 1.0 / static_cast<double>(focus.size());
  }
  return tape.sub(tape.logsumexp(logits), tape.dot_const(logits, w));
}

grad::NodeId build_loss(grad::Tape& tape, grad::NodeId logits,
                        std::span<const double> probs_detached,
                        std::span<const std::size_t> focus, const FocusConfig& config) {
  switch (config.loss) {
    case LossKind::kIfo:
      return loss_ifo(tape, logits, probs_detached, focus, config.weighted);
    case LossKind::kDofo:
      return loss_dofo(tape, logits, focus, tape.value(logits).size());
    case LossKind::kEntropy:
      return loss_entropy(tape, logits);
    case LossKind::kCeFocus:
      return loss_ce_focus(tape, logits, focus, probs_detached, config.weighted);
  }
  throw DomainError("unknown loss kind");
}

FocusStep focus_gradient(const net::Parameters& params, std::span<const double> input,
                         const FocusConfig& config) {
  config.validate(params.spec().num_classes());
  FocusStep step;
  FocusOutcome& out = step.outcome;

  auto fwd = grad::forward_mlp(params, input);
  const auto logits = fwd.tape.value(fwd.logits);
  const auto probs = net::softmax_stable(logits);
  out.original_prediction = net::argmax_class(logits);
  out.refined_prediction = out.original_prediction;
  out.delta12 = uncertainty_gap(probs);
  if (out.delta12 >= config.gap_threshold) {
    out.gated = true;
    return step;
  }
  out.focus_set = select_focus(probs, config.focus_count);
  const auto loss = build_loss(fwd.tape, fwd.logits, probs, out.focus_set, config);
  out.loss_value = fwd.tape.scalar(loss);
  step.grad = grad::backward(fwd.tape, loss);
  net::clip_gradient(step.grad.values, config.clip_norm);
  return step;
}

FocusOutcome focus_predict(net::Parameters& params, std::span<const double> input,
                           const FocusConfig& config) {
  config.validate(params.spec().num_classes());
  RestoreOnExit guard(params);

  FocusStep first = focus_gradient(params, input, config);
  FocusOutcome out = std::move(first.outcome);
  if (out.gated) return out;

  // clip_gradient already ran inside focus_gradient, so step with clipping off.
  net::sgd_step(params, first.grad, config.eta, 0.0);
  out.steps_run = 1;
  for (std::size_t t = 1; t < config.iterations && params.all_finite(); ++t) {
    auto fwd = grad::forward_mlp(params, input);
    const auto probs = net::softmax_stable(fwd.tape.value(fwd.logits));
    const auto loss = build_loss(fwd.tape, fwd.logits, probs, out.focus_set, config);
    net::sgd_step(params, grad::backward(fwd.tape, loss), config.eta, config.clip_norm);
    ++out.steps_run;
  }

  const auto logits = grad::predict_logits(params, input);
  if (!params.all_finite() || !all_finite(logits)) {
    out.diverged = true;
    out.refined_prediction = out.original_prediction;
    return out;
  }
  out.refined_prediction = net::argmax_class(logits);
  return out;
}

}  // namespace focus::refine
