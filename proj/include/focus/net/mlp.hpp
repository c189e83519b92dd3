#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "focus/data.hpp"
#include "focus/grad/tape.hpp"
#include "focus/net/parameters.hpp"

namespace focus::net {

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) from a seeded mt19937_64, biases 0.
Parameters init_params(const MlpSpec& spec);

// Shift-stabilized softmax. Sums to 1 and is unchanged by adding a constant.
std::vector<double> softmax_stable(std::span<const double> logits);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax_class(std::span<const double> logits);

// Global L2 norm rescale to clip_norm (0 disables), then params -= lr * grads.
// No momentum, no weight decay. Throws ShapeError on length mismatch and
// DomainError for negative lr or clip_norm.
void sgd_step(Parameters& params, const grad::GradVector& grads, double lr, double clip_norm);

// Scales grads in place so that ||grads|| <= clip_norm; returns the factor used.
double clip_gradient(std::span<double> grads, double clip_norm);

class Snapshot {
 public:
  explicit Snapshot(const Parameters& params) : state_(params) {}
  const Parameters& state() const { return state_; }

 private:
  Parameters state_;
};

inline Snapshot snapshot(const Parameters& params) { return Snapshot(params); }

// Copies the snapshot back bit for bit. Throws ShapeError if the specs differ.
void restore(Parameters& params, const Snapshot& snap);

struct TrainConfig {
  std::size_t epochs = 30;
  double lr = 0.05;
  std::size_t batch_size = 32;
  double clip_norm = 0.0;
  std::uint64_t seed = 0;
};

struct TrainReport {
  Parameters params;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
};

// Mini-batch SGD on mean cross-entropy, samples reshuffled each epoch from
// TrainConfig::seed. Throws DomainError for empty data or bad labels and
// NumericError if the loss stops being finite.
TrainReport train_base(const MlpSpec& spec, const Dataset& data, const TrainConfig& config);

double accuracy(const Parameters& params, const Dataset& data);

// Checkpoint text format, one token group per line:
//   focus-mlp 1
//   widths <n> <w0> ... <w(n-1)>
//   seed <seed>
//   params <count>
//   <value>            (count lines, %.17g, round-trips exactly)
void write_checkpoint(std::ostream& out, const Parameters& params);
Parameters read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const Parameters& params);
Parameters load_checkpoint(const std::string& path);

}  // namespace focus::net
