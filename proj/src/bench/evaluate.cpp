#include "focus/bench/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "focus/error.hpp"
#include "focus/grad/mlp_forward.hpp"
#include "focus/net/mlp.hpp"
#include "focus/simd/kernels.hpp"

namespace focus::bench {
namespace {

// Calls fn(worker, i) for i in [0, n). Worker w handles a contiguous block,
// so the assignment depends only on n and jobs.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(0, i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  const std::size_t chunk = (n + jobs - 1) / jobs;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) fn(w, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

SampleResult classify(std::size_t label, std::size_t original, std::size_t refined) {
  if (original == refined) return SampleResult::kUnchanged;
  if (refined == label) return SampleResult::kFixed;
  if (original == label) return SampleResult::kBroken;
  return SampleResult::kSwitchedWrong;
}

SampleOutcome make_outcome(std::size_t index, std::size_t label, const refine::FocusOutcome& o) {
  SampleOutcome s{index, label, o.original_prediction, o.refined_prediction, o.delta12, o.diverged,
                  SampleResult::kGated};
  if (!o.gated) s.result = classify(label, o.original_prediction, o.refined_prediction);
  return s;
}

std::vector<std::size_t> capped_uncertain(const net::Parameters& params, const Dataset& data,
                                          double d12, std::size_t max_samples, std::size_t& n_uncertain) {
  auto idx = partition_uncertain(params, data, d12).uncertain;
  n_uncertain = idx.size();
  if (idx.size() > max_samples) idx.resize(max_samples);
  return idx;
}

std::vector<double> sweep_rates(double base_lr, double factor, std::size_t count) {
  if (count == 0) throw DomainError("sweep needs at least one learning rate");
  if (!(base_lr >= 0.0) || !(factor > 0.0)) throw DomainError("sweep needs base_lr >= 0 and factor > 0");
  std::vector<double> lrs(count);
  for (std::size_t j = 0; j < count; ++j) lrs[j] = base_lr * std::pow(factor, static_cast<double>(j));
  return lrs;
}

}  // namespace

Partition partition_uncertain(const net::Parameters& params, const Dataset& data, double d12) {
  Partition p;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto probs = net::softmax_stable(grad::predict_logits(params, data.samples[i].features));
    (refine::uncertainty_gap(probs) < d12 ? p.uncertain : p.certain).push_back(i);
  }
  return p;
}

double topk_accuracy(const net::Parameters& params, const Dataset& data, std::size_t k) {
  const std::size_t classes = params.spec().num_classes();
  if (k < 1 || k > classes) throw DomainError("k must lie in [1, number of classes]");
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : data.samples) {
    const auto order = refine::rank_classes(grad::predict_logits(params, s.features));
    hits += std::find(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), s.label) !=
                    order.begin() + static_cast<std::ptrdiff_t>(k)
                ? 1
                : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

EvalReport summarize(const refine::FocusConfig& config, std::size_t n_total,
                     std::size_t n_uncertain, std::vector<SampleOutcome> outcomes) {
  EvalReport r;
  r.config = config;
  r.n_total = n_total;
  r.n_uncertain = n_uncertain;
  r.n_evaluated = outcomes.size();
  r.fraction_uncertain = n_total == 0 ? 0.0 : static_cast<double>(n_uncertain) / static_cast<double>(n_total);
  std::size_t base_ok = 0, opt_ok = 0;
  for (const auto& s : outcomes) {
    base_ok += s.original == s.label ? 1 : 0;
    opt_ok += s.refined == s.label ? 1 : 0;
    r.diverged += s.diverged ? 1 : 0;
    switch (s.result) {
      case SampleResult::kGated:
        ++r.gated;
        break;
      case SampleResult::kUnchanged:
        ++r.unchanged;
        break;
      case SampleResult::kFixed:
        ++r.changed;
        ++r.fixed;
        break;
      case SampleResult::kBroken:
        ++r.changed;
        ++r.broken;
        break;
      case SampleResult::kSwitchedWrong:
        ++r.changed;
        break;
    }
  }
  if (!outcomes.empty()) {
    const double n = static_cast<double>(outcomes.size());
    r.acc_base = static_cast<double>(base_ok) / n;
    r.acc_opt = static_cast<double>(opt_ok) / n;
    r.delta_acc = r.acc_opt - r.acc_base;
  }
  r.outcomes = std::move(outcomes);
  return r;
}

EvalReport evaluate_config(const net::Parameters& params, const Dataset& data,
                           const refine::FocusConfig& config, const EvalOptions& options) {
  config.validate(params.spec().num_classes());
  std::size_t n_uncertain = 0;
  const auto idx = capped_uncertain(params, data, config.gap_threshold, options.max_samples, n_uncertain);

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, idx.size()));
  std::vector<net::Parameters> clones(jobs, params);
  std::vector<SampleOutcome> outcomes(idx.size());
  parallel_for(idx.size(), jobs, [&](std::size_t w, std::size_t i) {
    const auto& s = data.samples[idx[i]];
    outcomes[i] = make_outcome(idx[i], s.label, refine::focus_predict(clones[w], s.features, config));
  });
  return summarize(config, data.size(), n_uncertain, std::move(outcomes));
}

SweepTable lr_sweep(const net::Parameters& params, const Dataset& data,
                    const refine::FocusConfig& base_config, double base_lr, double factor,
                    std::size_t count, const EvalOptions& options) {
  if (base_config.iterations != 1) throw DomainError("lr_sweep replay requires iterations == 1");
  base_config.validate(params.spec().num_classes());
  const auto lrs = sweep_rates(base_lr, factor, count);
  std::size_t n_uncertain = 0;
  const auto idx = capped_uncertain(params, data, base_config.gap_threshold, options.max_samples, n_uncertain);

  // per_lr[j][i]: outcome of sample idx[i] at lrs[j]
  std::vector<std::vector<SampleOutcome>> per_lr(count, std::vector<SampleOutcome>(idx.size()));
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, idx.size()));
  std::vector<net::Parameters> work(jobs, params);
  parallel_for(idx.size(), jobs, [&](std::size_t w, std::size_t i) {
    const auto& s = data.samples[idx[i]];
    const auto step = refine::focus_gradient(params, s.features, base_config);
    net::Parameters& theta = work[w];
    const net::Snapshot snap(theta);
    double applied = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      refine::FocusOutcome o = step.outcome;
      if (!o.gated && lrs[j] > 0.0) {
        simd::axpy(-(lrs[j] - applied), step.grad.values, theta.values());
        applied = lrs[j];
        o.steps_run = 1;
        const auto logits = grad::predict_logits(theta, s.features);
        const bool finite = theta.all_finite() &&
                            std::all_of(logits.begin(), logits.end(), [](double v) { return std::isfinite(v); });
        o.diverged = !finite;
        o.refined_prediction = finite ? net::argmax_class(logits) : o.original_prediction;
      }
      per_lr[j][i] = make_outcome(idx[i], s.label, o);
    }
    net::restore(theta, snap);
  });

  SweepTable table{lrs, {}};
  for (std::size_t j = 0; j < count; ++j) {
    refine::FocusConfig cfg = base_config;
    cfg.eta = lrs[j];
    table.reports.push_back(summarize(cfg, data.size(), n_uncertain, std::move(per_lr[j])));
  }
  return table;
}

SweepTable lr_sweep_naive(const net::Parameters& params, const Dataset& data,
                          const refine::FocusConfig& base_config, double base_lr, double factor,
                          std::size_t count, const EvalOptions& options) {
  SweepTable table{sweep_rates(base_lr, factor, count), {}};
  for (double lr : table.lrs) {
    refine::FocusConfig cfg = base_config;
    cfg.eta = lr;
    table.reports.push_back(evaluate_config(params, data, cfg, options));
  }
  return table;
}

SingleVsMulti single_vs_multi(const net::Parameters& params, const Dataset& data,
                              const refine::FocusConfig& base_config, double eta,
                              std::size_t t_multi, std::span<const int> power_grid,
                              const EvalOptions& options) {
  if (!(eta >= 0.0)) throw DomainError("eta must be >= 0");
  if (t_multi < 1) throw DomainError("T_multi must be >= 1");
  SingleVsMulti out;
  refine::FocusConfig multi = base_config;
  multi.eta = eta;
  multi.iterations = t_multi;
  out.multi = evaluate_config(params, data, multi, options);
  for (int power : power_grid) {
    refine::FocusConfig single = base_config;
    single.iterations = 1;
    single.eta = eta * std::ldexp(1.0, power);
    out.powers.push_back(power);
    out.single.push_back(evaluate_config(params, data, single, options));
  }
  return out;
}

}  // namespace focus::bench
