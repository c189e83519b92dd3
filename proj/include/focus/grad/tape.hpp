#pragma once

// Reverse-mode differentiation over a small set of vector primitives.
//
// A Tape owns a copy of the parameter vector it differentiates against and a
// list of nodes in the order they were recorded, so inputs always precede the
// nodes that use them. Every node holds a dense vector value; scalars are
// length-1 vectors. backward() walks the nodes in reverse and returns the
// gradient of a scalar root with respect to every parameter.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "focus/net/parameters.hpp"

namespace focus::grad {

struct NodeId {
  std::uint64_t tape = 0;
  std::size_t index = 0;
};

// Partial derivatives aligned index-for-index with the parameter vector.
struct GradVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

class Tape {
 public:
  explicit Tape(std::span<const double> params);

  Tape(const Tape&) = default;
  Tape(Tape&&) noexcept = default;
  Tape& operator=(const Tape&) = default;
  Tape& operator=(Tape&&) noexcept = default;

  // Leaves.
  NodeId input(std::span<const double> values);
  NodeId constant(double value);
  NodeId parameter_slice(std::size_t offset, std::size_t length);

  // y = W x + b with W, b read from the parameter vector.
  NodeId affine(NodeId x, const net::AffineLayout& layout);
  NodeId relu(NodeId x);
  NodeId exp(NodeId x);
  // Scalar log(sum(exp(x))), evaluated with a max shift.
  NodeId logsumexp(NodeId x);
  NodeId concat(std::span<const NodeId> parts);

  // Element-wise on equal-length operands.
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double factor);
  // v - s, where s is a scalar node broadcast over v.
  NodeId sub_scalar(NodeId v, NodeId s);

  // Reductions to a scalar.
  NodeId sum(NodeId a);
  // sum_i weights[i] * x[i]; the weights are constants.
  NodeId dot_const(NodeId x, std::span<const double> weights);

  std::span<const double> value(NodeId id) const;
  double scalar(NodeId id) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t parameter_count() const { return params_.size(); }
  bool owns(NodeId id) const { return id.tape == id_ && id.index < nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    kInput,
    kParamSlice,
    kAffine,
    kRelu,
    kExp,
    kLogSumExp,
    kConcat,
    kAdd,
    kSub,
    kMul,
    kScale,
    kSubScalar,
    kSum,
    kDotConst,
  };

  struct Node {
    Op op;
    std::vector<std::size_t> args;
    std::size_t offset;  // into values_
    std::size_t size;
    net::AffineLayout layout{};  // kAffine; kParamSlice uses weight_offset
    double factor = 0.0;         // kScale
    std::vector<double> weights{};  // kDotConst
  };

  std::size_t check(NodeId id) const;
  NodeId push(Node node, std::span<const double> value);
  std::span<const double> value_at(std::size_t index) const;

  friend GradVector backward(const Tape& tape, NodeId root);
  friend void backward_accumulate(const Tape& tape, NodeId root, double scale,
                                  std::span<double> grad);

  std::uint64_t id_;
  std::vector<double> params_;
  std::vector<Node> nodes_;
  std::vector<double> values_;
};

// Gradient of the scalar root with respect to every parameter. Throws
// ShapeError if root is not a scalar and std::invalid_argument if root does not
// belong to this tape. The tape itself is not modified.
GradVector backward(const Tape& tape, NodeId root);

// grad += scale * d(root)/d(params); grad.size() must equal the parameter count.
void backward_accumulate(const Tape& tape, NodeId root, double scale,
                         std::span<double> grad);

}  // namespace focus::grad
