#include "focus/grad/mlp_forward.hpp"

#include <string>

#include "focus/error.hpp"
#include "focus/simd/kernels.hpp"

namespace focus::grad {
namespace {

void check_input(const net::Parameters& params, std::span<const double> input) {
  if (input.size() != params.spec().input_width()) {
    throw ShapeError("input has width " + std::to_string(input.size()) + ", network expects " +
                     std::to_string(params.spec().input_width()));
  }
}

}  // namespace

MlpForward forward_mlp(const net::Parameters& params, std::span<const double> input) {
  check_input(params, input);
  Tape tape(params.values());
  NodeId h = tape.input(input);
  const auto& layouts = params.layouts();
  for (std::size_t l = 0; l < layouts.size(); ++l) {
    h = tape.affine(h, layouts[l]);
    if (l + 1 < layouts.size()) h = tape.relu(h);
  }
  return MlpForward{std::move(tape), h};
}

std::vector<double> predict_logits(const net::Parameters& params, std::span<const double> input) {
  check_input(params, input);
  std::vector<double> h(input.begin(), input.end());
  std::vector<double> next;
  const auto& layouts = params.layouts();
  for (std::size_t l = 0; l < layouts.size(); ++l) {
    next.assign(layouts[l].out, 0.0);
    simd::gemv(params.weights(l), params.bias(l), h, next);
    if (l + 1 < layouts.size()) {
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    }
    h.swap(next);
  }
  return h;
}

}  // namespace focus::grad
