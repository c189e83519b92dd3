#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "focus/data.hpp"
#include "focus/net/parameters.hpp"
#include "focus/refine/focus.hpp"

namespace focus::bench {

struct Partition {
  std::vector<std::size_t> uncertain;  // gap < d12
  std::vector<std::size_t> certain;
};

Partition partition_uncertain(const net::Parameters& params, const Dataset& data, double d12);

// Fraction of samples whose label is among the k highest logits (ties by
// lower index). Throws DomainError unless 1 <= k <= K.
double topk_accuracy(const net::Parameters& params, const Dataset& data, std::size_t k);

enum class SampleResult {
  kGated,
  kUnchanged,
  kFixed,          // wrong -> right
  kBroken,         // right -> wrong
  kSwitchedWrong,  // wrong -> another wrong class
};

struct SampleOutcome {
  std::size_t index;  // into the evaluated dataset
  std::size_t label;
  std::size_t original;
  std::size_t refined;
  double delta12;
  bool diverged;
  SampleResult result;
};

struct EvalReport {
  refine::FocusConfig config;
  std::size_t n_total = 0;
  std::size_t n_uncertain = 0;   // before the max_samples cap
  std::size_t n_evaluated = 0;
  double fraction_uncertain = 0.0;
  double acc_base = 0.0;  // on the evaluated uncertain samples
  double acc_opt = 0.0;
  double delta_acc = 0.0;
  std::size_t gated = 0;
  std::size_t unchanged = 0;
  std::size_t changed = 0;
  std::size_t fixed = 0;
  std::size_t broken = 0;
  std::size_t diverged = 0;
  std::vector<SampleOutcome> outcomes;

  bool empty() const { return n_evaluated == 0; }
};

struct EvalOptions {
  std::size_t max_samples = 20000;
  std::size_t jobs = 1;
};

// Runs focus_predict on every uncertain sample (gap < config.gap_threshold).
// Samples are distributed over `jobs` workers, each with a private copy of
// params; the report is identical for any job count.
EvalReport evaluate_config(const net::Parameters& params, const Dataset& data,
                           const refine::FocusConfig& config, const EvalOptions& options = {});

// Builds a report from per-sample outcomes (accuracy and the counters).
EvalReport summarize(const refine::FocusConfig& config, std::size_t n_total,
                     std::size_t n_uncertain, std::vector<SampleOutcome> outcomes);

struct SweepTable {
  std::vector<double> lrs;
  std::vector<EvalReport> reports;
};

// lr_j = base_lr * factor^j for j < count. Per sample, one gradient is
// computed and the update is replayed incrementally for each rate. Requires
// base_config.iterations == 1 (DomainError otherwise).
SweepTable lr_sweep(const net::Parameters& params, const Dataset& data,
                    const refine::FocusConfig& base_config, double base_lr, double factor,
                    std::size_t count, const EvalOptions& options = {});

// Reference path: an independent focus_predict run for every rate.
SweepTable lr_sweep_naive(const net::Parameters& params, const Dataset& data,
                          const refine::FocusConfig& base_config, double base_lr,
                          double factor, std::size_t count, const EvalOptions& options = {});

struct SingleVsMulti {
  EvalReport multi;                  // iterations = T_multi at eta
  std::vector<int> powers;
  std::vector<EvalReport> single;    // one step at eta * 2^power
};

SingleVsMulti single_vs_multi(const net::Parameters& params, const Dataset& data,
                              const refine::FocusConfig& base_config, double eta,
                              std::size_t t_multi, std::span<const int> power_grid,
                              const EvalOptions& options = {});

}  // namespace focus::bench
