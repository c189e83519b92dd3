#include "focus/grad/tape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "focus/error.hpp"
#include "focus/simd/kernels.hpp"

namespace focus::grad {
namespace {

std::uint64_t next_tape_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

double stable_logsumexp(std::span<const double> x) {
  const double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - m);
  return m + std::log(acc);
}

}  // namespace

Tape::Tape(std::span<const double> params)
    : id_(next_tape_id()), params_(params.begin(), params.end()) {}

std::size_t Tape::check(NodeId id) const {
  if (!owns(id)) throw std::invalid_argument("node does not belong to this tape");
  return id.index;
}

std::span<const double> Tape::value_at(std::size_t index) const {
  const Node& n = nodes_[index];
  return std::span<const double>(values_).subspan(n.offset, n.size);
}

std::span<const double> Tape::value(NodeId id) const { return value_at(check(id)); }

double Tape::scalar(NodeId id) const {
  const auto v = value(id);
  if (v.size() != 1) throw ShapeError("node is not a scalar");
  return v[0];
}

NodeId Tape::push(Node node, std::span<const double> value) {
  node.offset = values_.size();
  node.size = value.size();
  values_.insert(values_.end(), value.begin(), value.end());
  nodes_.push_back(std::move(node));
  return NodeId{id_, nodes_.size() - 1};
}

NodeId Tape::input(std::span<const double> values) {
  return push(Node{Op::kInput, {}, 0, 0}, values);
}

NodeId Tape::constant(double value) {
  return push(Node{Op::kInput, {}, 0, 0}, std::span<const double>(&value, 1));
}

NodeId Tape::parameter_slice(std::size_t offset, std::size_t length) {
  if (offset + length > params_.size()) throw ShapeError("parameter slice out of range");
  Node node{Op::kParamSlice, {}, 0, 0};
  node.layout.weight_offset = offset;
  return push(std::move(node), std::span<const double>(params_).subspan(offset, length));
}

NodeId Tape::affine(NodeId x, const net::AffineLayout& layout) {
  const std::size_t xi = check(x);
  const auto in = value_at(xi);
  if (in.size() != layout.in) {
    throw ShapeError("affine input has width " + std::to_string(in.size()) + ", layer expects " +
                     std::to_string(layout.in));
  }
  if (layout.bias_offset + layout.out > params_.size()) throw ShapeError("affine layout out of range");
  const std::span<const double> p(params_);
  std::vector<double> out(layout.out);
  simd::gemv(p.subspan(layout.weight_offset, layout.in * layout.out),
             p.subspan(layout.bias_offset, layout.out), in, out);
  Node node{Op::kAffine, {xi}, 0, 0};
  node.layout = layout;
  return push(std::move(node), out);
}

NodeId Tape::relu(NodeId x) {
  const std::size_t xi = check(x);
  std::vector<double> out(value_at(xi).begin(), value_at(xi).end());
  for (double& v : out) v = v > 0.0 ? v : 0.0;
  return push(Node{Op::kRelu, {xi}, 0, 0}, out);
}

NodeId Tape::exp(NodeId x) {
  const std::size_t xi = check(x);
  std::vector<double> out(value_at(xi).begin(), value_at(xi).end());
  for (double& v : out) v = std::exp(v);
  return push(Node{Op::kExp, {xi}, 0, 0}, out);
}

NodeId Tape::logsumexp(NodeId x) {
  const std::size_t xi = check(x);
  if (value_at(xi).empty()) throw ShapeError("logsumexp of an empty vector");
  const double v = stable_logsumexp(value_at(xi));
  return push(Node{Op::kLogSumExp, {xi}, 0, 0}, std::span<const double>(&v, 1));
}

NodeId Tape::concat(std::span<const NodeId> parts) {
  std::vector<std::size_t> args;
  std::vector<double> out;
  for (NodeId part : parts) {
    const std::size_t pi = check(part);
    args.push_back(pi);
    const auto v = value_at(pi);
    out.insert(out.end(), v.begin(), v.end());
  }
  return push(Node{Op::kConcat, std::move(args), 0, 0}, out);
}

namespace {

template <typename F>
std::vector<double> zip(std::span<const double> a, std::span<const double> b, F f) {
  if (a.size() != b.size()) throw ShapeError("element-wise operands differ in length");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  return out;
}

}  // namespace

NodeId Tape::add(NodeId a, NodeId b) {
  const std::size_t ai = check(a), bi = check(b);
  return push(Node{Op::kAdd, {ai, bi}, 0, 0},
              zip(value_at(ai), value_at(bi), [](double u, double v) { return u + v; }));
}

NodeId Tape::sub(NodeId a, NodeId b) {
  const std::size_t ai = check(a), bi = check(b);
  return push(Node{Op::kSub, {ai, bi}, 0, 0},
              zip(value_at(ai), value_at(bi), [](double u, double v) { return u - v; }));
}

NodeId Tape::mul(NodeId a, NodeId b) {
  const std::size_t ai = check(a), bi = check(b);
  return push(Node{Op::kMul, {ai, bi}, 0, 0},
              zip(value_at(ai), value_at(bi), [](double u, double v) { return u * v; }));
}

NodeId Tape::scale(NodeId a, double factor) {
  const std::size_t ai = check(a);
  std::vector<double> out(value_at(ai).begin(), value_at(ai).end());
  for (double& v : out) v *= factor;
  Node node{Op::kScale, {ai}, 0, 0};
  node.factor = factor;
  return push(std::move(node), out);
}

NodeId Tape::sub_scalar(NodeId v, NodeId s) {
  const std::size_t vi = check(v), si = check(s);
  if (value_at(si).size() != 1) throw ShapeError("sub_scalar needs a scalar subtrahend");
  const double shift = value_at(si)[0];
  std::vector<double> out(value_at(vi).begin(), value_at(vi).end());
  for (double& x : out) x -= shift;
  return push(Node{Op::kSubScalar, {vi, si}, 0, 0}, out);
}

NodeId Tape::sum(NodeId a) {
  const std::size_t ai = check(a);
  double acc = 0.0;
  for (double v : value_at(ai)) acc += v;
  return push(Node{Op::kSum, {ai}, 0, 0}, std::span<const double>(&acc, 1));
}

NodeId Tape::dot_const(NodeId x, std::span<const double> weights) {
  const std::size_t xi = check(x);
  const auto v = value_at(xi);
  if (v.size() != weights.size()) throw ShapeError("dot_const weights differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += weights[i] * v[i];
  Node node{Op::kDotConst, {xi}, 0, 0};
  node.weights.assign(weights.begin(), weights.end());
  return push(std::move(node), std::span<const double>(&acc, 1));
}

void backward_accumulate(const Tape& tape, NodeId root, double scale, std::span<double> grad) {
  const std::size_t ri = tape.check(root);
  if (tape.nodes_[ri].size != 1) throw ShapeError("backward root must be a scalar");
  if (grad.size() != tape.params_.size()) throw ShapeError("gradient buffer has wrong length");

  using Op = Tape::Op;
  std::vector<double> adj(tape.nodes_[ri].offset + 1, 0.0);
  adj[tape.nodes_[ri].offset] = scale;
  const std::span<const double> params(tape.params_);

  for (std::size_t i = ri + 1; i-- > 0;) {
    const Tape::Node& n = tape.nodes_[i];
    const std::span<const double> g(adj.data() + n.offset, n.size);
    if (std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; })) continue;
    const std::span<const double> val = tape.value_at(i);
    auto adj_of = [&](std::size_t arg) {
      const Tape::Node& a = tape.nodes_[arg];
      return std::span<double>(adj.data() + a.offset, a.size);
    };

    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kParamSlice:
        for (std::size_t k = 0; k < n.size; ++k) grad[n.layout.weight_offset + k] += g[k];
        break;
      case Op::kAffine: {
        const auto& L = n.layout;
        const auto x = tape.value_at(n.args[0]);
        simd::rank1_accumulate(1.0, g, x, grad.subspan(L.weight_offset, L.in * L.out));
        simd::axpy(1.0, g, grad.subspan(L.bias_offset, L.out));
        simd::gemv_transposed_accumulate(params.subspan(L.weight_offset, L.in * L.out), g,
                                         adj_of(n.args[0]));
        break;
      }
      case Op::kRelu: {
        auto dx = adj_of(n.args[0]);
        for (std::size_t k = 0; k < n.size; ++k) {
          if (val[k] > 0.0) dx[k] += g[k];
        }
        break;
      }
      case Op::kExp: {
        auto dx = adj_of(n.args[0]);
        for (std::size_t k = 0; k < n.size; ++k) dx[k] += g[k] * val[k];
        break;
      }
      case Op::kLogSumExp: {
        const auto x = tape.value_at(n.args[0]);
        auto dx = adj_of(n.args[0]);
        for (std::size_t k = 0; k < x.size(); ++k) dx[k] += g[0] * std::exp(x[k] - val[0]);
        break;
      }
      case Op::kConcat: {
        std::size_t pos = 0;
        for (std::size_t arg : n.args) {
          auto dx = adj_of(arg);
          for (double& d : dx) d += g[pos++];
        }
        break;
      }
      case Op::kAdd:
      case Op::kSub: {
        const double sign = n.op == Op::kAdd ? 1.0 : -1.0;
        auto da = adj_of(n.args[0]);
        for (std::size_t k = 0; k < n.size; ++k) da[k] += g[k];
        auto db = adj_of(n.args[1]);
        for (std::size_t k = 0; k < n.size; ++k) db[k] += sign * g[k];
        break;
      }
      case Op::kMul: {
        const auto a = tape.value_at(n.args[0]);
        const auto b = tape.value_at(n.args[1]);
        // Copy first: both operands may be the same node.
        std::vector<double> ga(n.size), gb(n.size);
        for (std::size_t k = 0; k < n.size; ++k) {
          ga[k] = g[k] * b[k];
          gb[k] = g[k] * a[k];
        }
        auto da = adj_of(n.args[0]);
        for (std::size_t k = 0; k < n.size; ++k) da[k] += ga[k];
        auto db = adj_of(n.args[1]);
        for (std::size_t k = 0; k < n.size; ++k) db[k] += gb[k];
        break;
      }
      case Op::kScale: {
        auto dx = adj_of(n.args[0]);
        for (std::size_t k = 0; k < n.size; ++k) dx[k] += n.factor * g[k];
        break;
      }
      case Op::kSubScalar: {
        auto dv = adj_of(n.args[0]);
        double total = 0.0;
        for (std::size_t k = 0; k < n.size; ++k) {
          dv[k] += g[k];
          total += g[k];
        }
        adj_of(n.args[1])[0] -= total;
        break;
      }
      case Op::kSum: {
        for (double& d : adj_of(n.args[0])) d += g[0];
        break;
      }
      case Op::kDotConst: {
        auto dx = adj_of(n.args[0]);
        for (std::size_t k = 0; k < dx.size(); ++k) dx[k] += g[0] * n.weights[k];
        break;
      }
    }
  }
}

GradVector backward(const Tape& tape, NodeId root) {
  GradVector out{std::vector<double>(tape.parameter_count(), 0.0)};
  backward_accumulate(tape, root, 1.0, out.values);
  return out;
}

}  // namespace focus::grad
