#pragma once

#include <span>
#include <vector>

#include "focus/grad/tape.hpp"
#include "focus/net/parameters.hpp"

namespace focus::grad {

struct MlpForward {
  Tape tape;
  NodeId logits;
};

// Records the network on a fresh tape. Throws ShapeError when the input width
// does not match the first layer.
MlpForward forward_mlp(const net::Parameters& params, std::span<const double> input);

// Same arithmetic as forward_mlp without recording; the logits are bit-equal.
std::vector<double> predict_logits(const net::Parameters& params,
                                   std::span<const double> input);

}  // namespace focus::grad
