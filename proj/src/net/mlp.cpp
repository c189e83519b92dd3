#include "focus/net/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "focus/error.hpp"
#include "focus/grad/mlp_forward.hpp"
#include "focus/simd/kernels.hpp"

namespace focus::net {

Parameters init_params(const MlpSpec& spec) {
  Parameters params(spec);
  std::mt19937_64 rng(spec.seed);
  auto values = params.values();
  for (const AffineLayout& layer : params.layouts()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < layer.in * layer.out; ++i) {
      values[layer.weight_offset + i] = dist(rng);
    }
  }
  return params;
}

std::vector<double> softmax_stable(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  if (out.empty()) return out;
  const double m = *std::max_element(out.begin(), out.end());
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - m);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

std::size_t argmax_class(std::span<const double> logits) {
  if (logits.empty()) throw DomainError("argmax of an empty vector");
  return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double clip_gradient(std::span<double> grads, double clip_norm) {
  if (clip_norm < 0.0) throw DomainError("clip_norm must be >= 0");
  if (clip_norm == 0.0) return 1.0;
  const double norm = std::sqrt(simd::sum_squares(grads));
  if (!(norm > clip_norm)) return 1.0;
  const double factor = clip_norm / norm;
  simd::scale(factor, grads);
  return factor;
}

void sgd_step(Parameters& params, const grad::GradVector& grads, double lr, double clip_norm) {
  if (grads.size() != params.size()) throw ShapeError("gradient length does not match parameters");
  if (lr < 0.0) throw DomainError("learning rate must be >= 0");
  if (lr == 0.0) {
    if (clip_norm < 0.0) throw DomainError("clip_norm must be >= 0");
    return;
  }
  std::vector<double> g = grads.values;
  clip_gradient(g, clip_norm);
  simd::axpy(-lr, g, params.values());
}

void restore(Parameters& params, const Snapshot& snap) {
  if (!(params.spec() == snap.state().spec())) throw ShapeError("snapshot belongs to a different network");
  const auto src = snap.state().values();
  std::copy(src.begin(), src.end(), params.values().begin());
}

double accuracy(const Parameters& params, const Dataset& data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const LabeledSample& s : data.samples) {
    correct += argmax_class(grad::predict_logits(params, s.features)) == s.label ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainReport train_base(const MlpSpec& spec, const Dataset& data, const TrainConfig& config) {
  spec.validate();
  if (data.empty()) throw DomainError("training set is empty");
  if (config.batch_size == 0) throw DomainError("batch_size must be positive");
  for (const LabeledSample& s : data.samples) {
    if (s.label >= spec.num_classes()) throw DomainError("label out of range for the network");
  }

  Parameters params = init_params(spec);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  grad::GradVector batch_grad{std::vector<double>(params.size())};
  std::vector<double> onehot(spec.num_classes());
  double epoch_loss = 0.0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      std::fill(batch_grad.values.begin(), batch_grad.values.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const LabeledSample& s = data.samples[order[k]];
        auto fwd = grad::forward_mlp(params, s.features);
        std::fill(onehot.begin(), onehot.end(), 0.0);
        onehot[s.label] = 1.0;
        const auto loss = fwd.tape.sub(fwd.tape.logsumexp(fwd.logits),
                                       fwd.tape.dot_const(fwd.logits, onehot));
        const double value = fwd.tape.scalar(loss);
        if (!std::isfinite(value)) throw NumericError("training loss became non-finite");
        epoch_loss += value;
        grad::backward_accumulate(fwd.tape, loss, weight, batch_grad.values);
      }
      sgd_step(params, batch_grad, config.lr, config.clip_norm);
    }
    epoch_loss /= static_cast<double>(order.size());
  }
  if (!params.all_finite()) throw NumericError("training produced non-finite parameters");

  TrainReport report{params, accuracy(params, data), epoch_loss};
  return report;
}

void write_checkpoint(std::ostream& out, const Parameters& params) {
  const MlpSpec& spec = params.spec();
  out << "focus-mlp 1\nwidths " << spec.layer_widths.size();
  for (std::size_t w : spec.layer_widths) out << ' ' << w;
  out << "\nseed " << spec.seed << "\nparams " << params.size() << '\n';
  char buf[32];
  for (double v : params.values()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
}

Parameters read_checkpoint(std::istream& in) {
  auto fail = [](const std::string& what) -> Parameters {
    throw ShapeError("malformed checkpoint: " + what);
  };
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "focus-mlp" || version != 1) return fail("header");
  MlpSpec spec;
  std::size_t n = 0;
  if (!(in >> tag >> n) || tag != "widths") return fail("widths");
  spec.layer_widths.resize(n);
  for (auto& w : spec.layer_widths) {
    if (!(in >> w)) return fail("widths");
  }
  if (!(in >> tag >> spec.seed) || tag != "seed") return fail("seed");
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "params") return fail("params");
  std::vector<double> values(count);
  std::string token;
  for (double& v : values) {
    if (!(in >> token)) return fail("truncated values");
    v = std::strtod(token.c_str(), nullptr);
  }
  return Parameters(std::move(spec), std::move(values));
}

void save_checkpoint(const std::string& path, const Parameters& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_checkpoint(out, params);
}

Parameters load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_checkpoint(in);
}

}  // namespace focus::net
