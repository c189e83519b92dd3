#include "focus/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "focus/bench/benchmark.hpp"
#include "focus/bench/dataset.hpp"
#include "focus/bench/evaluate.hpp"
#include "focus/bench/report_io.hpp"
#include "focus/bench/sign_test.hpp"
#include "focus/error.hpp"
#include "focus/net/mlp.hpp"
#include "focus/simd/kernels.hpp"
#include "focus/theory/toy_model.hpp"

namespace focus::cli {
namespace {

namespace fs = std::filesystem;
using bench::JsonRecord;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Collects records and CSV rows and writes them to <out>/<stem>.{jsonl,csv}.
class Sink {
 public:
  Sink(const RunConfig& config, std::string command) : config_(config), command_(std::move(command)) {}

  void record(JsonRecord payload) {
    JsonRecord rec;
    rec.add("format_version", bench::kFormatVersion).add("command", std::string_view(command_));
    rec.add("record", payload).add("config", config_.echo());
    jsonl_ += rec.str() + '\n';
  }
  void csv_header(std::string header) { csv_ = header + '\n'; }
  void csv_row(const std::string& row) { csv_ += row + '\n'; }

  void flush(const fs::path& dir, std::ostream& log) const {
    write(dir / (command_ + ".jsonl"), jsonl_, log);
    if (!csv_.empty()) write(dir / (command_ + ".csv"), csv_, log);
  }

  static void write(const fs::path& path, const std::string& text, std::ostream& log) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
    log << "wrote " << path.string() << '\n';
  }

 private:
  const RunConfig& config_;
  std::string command_;
  std::string jsonl_;
  std::string csv_;
};

struct Inputs {
  std::uint64_t seed;
  Dataset test;
  net::Parameters params;
};

// Either the model/test_data files, or one in-memory benchmark per run.
std::vector<Inputs> load_inputs(const RunConfig& config, std::ostream& log) {
  const bool has_model = !config.raw("model").empty();
  const bool has_data = !config.raw("test_data").empty();
  if (has_model != has_data) throw ConfigError("model and test_data must be given together");
  std::vector<Inputs> inputs;
  if (has_model) {
    if (config.count("runs") != 1) throw ConfigError("runs > 1 requires an in-memory benchmark");
    auto params = net::load_checkpoint(config.raw("model"));
    auto test = bench::load_dataset(config.raw("test_data"), params.spec().num_classes());
    if (test.num_classes > params.spec().num_classes()) {
      throw ShapeError("test_data has more classes than the model");
    }
    if (test.feature_dim != params.spec().layer_widths.front()) {
      throw ShapeError("test_data feature width does not match the model input");
    }
    inputs.push_back(Inputs{config.seed(), std::move(test), std::move(params)});
    return inputs;
  }
  const auto spec = config.benchmark_spec();
  for (std::size_t r = 0; r < config.count("runs"); ++r) {
    const std::uint64_t seed = config.seed() + r;
    auto inst = bench::make_benchmark(spec, seed);
    log << "benchmark seed " << seed << ": train accuracy " << bench::format_number(inst.train_accuracy) << '\n';
    inputs.push_back(Inputs{seed, std::move(inst.test), std::move(inst.params)});
  }
  return inputs;
}

std::string run_prefix(std::size_t run, std::uint64_t seed) {
  return std::to_string(run) + ',' + std::to_string(seed);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Standard error of the mean; NaN below two values.
double std_error(const std::vector<double>& v) {
  if (v.size() < 2) return kNaN;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

void cmd_gen_data(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const auto spec = config.benchmark_spec();
  const auto all = bench::gen_synthetic(spec.data);
  auto [test, train] = bench::split_dataset(all, spec.test_fraction, config.seed());
  bench::save_dataset((out / "train.csv").string(), train);
  bench::save_dataset((out / "test.csv").string(), test);
  log << "wrote " << (out / "train.csv").string() << " and " << (out / "test.csv").string() << '\n';
  Sink sink(config, "gen-data");
  JsonRecord rec;
  rec.add("n_train", train.size()).add("n_test", test.size()).add("num_classes", all.num_classes)
      .add("feature_dim", all.feature_dim);
  sink.record(rec);
  sink.flush(out, log);
}

void cmd_train(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const auto spec = config.benchmark_spec();
  Dataset train;
  if (config.raw("train_data").empty()) {
    auto split = bench::split_dataset(bench::gen_synthetic(spec.data), spec.test_fraction, config.seed());
    train = std::move(split.second);
  } else {
    train = bench::load_dataset(config.raw("train_data"), spec.data.num_classes);
  }
  net::MlpSpec mlp = bench::mlp_for(spec, config.seed());
  mlp.layer_widths.front() = train.feature_dim;
  mlp.layer_widths.back() = std::max(train.num_classes, spec.data.num_classes);
  auto report = net::train_base(mlp, train, spec.train);
  const fs::path model = out / "model.ckpt";
  net::save_checkpoint(model.string(), report.params);
  log << "wrote " << model.string() << '\n';
  Sink sink(config, "train");
  JsonRecord rec;
  rec.add("n_train", train.size()).add("parameter_count", report.params.size())
      .add("train_accuracy", report.train_accuracy).add("final_loss", report.final_loss);
  sink.record(rec);
  sink.flush(out, log);
}

void cmd_eval(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const auto focus = config.focus_config();
  const auto options = config.eval_options();
  Sink sink(config, "eval");
  sink.csv_header(bench::report_csv_header("run,seed"));
  std::string outcomes;
  std::size_t run = 0;
  for (const auto& in : load_inputs(config, log)) {
    const auto report = bench::evaluate_config(in.params, in.test, focus, options);
    JsonRecord rec;
    rec.add("run", run).add("seed", static_cast<std::int64_t>(in.seed)).add("report", bench::report_record(report));
    sink.record(rec);
    sink.csv_row(bench::report_csv_row(report, run_prefix(run, in.seed)));
    if (run == 0) {
      std::ostringstream os;
      bench::write_outcomes_csv(os, report);
      outcomes = os.str();
    }
    ++run;
  }
  sink.flush(out, log);
  Sink::write(out / "eval_outcomes.csv", outcomes, log);
}

void cmd_sweep(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const auto base = config.focus_config();
  const auto options = config.eval_options();
  const auto kinds = config.words("losses");
  const auto inputs = load_inputs(config, log);
  Sink sink(config, "sweep");
  sink.csv_header(bench::report_csv_header("run,seed"));
  for (std::size_t run = 0; run < inputs.size(); ++run) {
    const auto& in = inputs[run];
    for (const auto& kind : kinds) {
      auto focus = base;
      focus.loss = refine::parse_loss_kind(kind);
      const auto report = bench::evaluate_config(in.params, in.test, focus, options);
      JsonRecord rec;
      rec.add("run", run).add("seed", static_cast<std::int64_t>(in.seed)).add("loss", std::string_view(kind))
          .add("report", bench::report_record(report));
      sink.record(rec);
      sink.csv_row(bench::report_csv_row(report, run_prefix(run, in.seed)));
    }
  }
  sink.flush(out, log);
}

void cmd_lr_sweep(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const auto focus = config.focus_config();
  if (focus.iterations != 1) throw ConfigError("lr-sweep replays a single step and requires iterations = 1");
  const auto options = config.eval_options();
  const auto inputs = load_inputs(config, log);
  Sink sink(config, "lr-sweep");
  sink.csv_header(bench::report_csv_header("run,seed,lr_index"));
  std::size_t positive = 0, negative = 0;
  std::vector<double> best_deltas;
  for (std::size_t run = 0; run < inputs.size(); ++run) {
    const auto& in = inputs[run];
    const auto table = bench::lr_sweep(in.params, in.test, focus, config.real("base_lr"), config.real("factor"),
                                       config.count("count"), options);
    std::size_t best = 0;
    for (std::size_t j = 0; j < table.lrs.size(); ++j) {
      const auto& report = table.reports[j];
      if (report.delta_acc > table.reports[best].delta_acc) best = j;
      JsonRecord rec;
      rec.add("run", run).add("seed", static_cast<std::int64_t>(in.seed)).add("lr_index", j)
          .add("lr", table.lrs[j]).add("report", bench::report_record(report));
      sink.record(rec);
      sink.csv_row(bench::report_csv_row(report, run_prefix(run, in.seed) + ',' + std::to_string(j)));
    }
    const double d = table.reports[best].delta_acc;
    best_deltas.push_back(d);
    positive += d > 0.0 ? 1 : 0;
    negative += d < 0.0 ? 1 : 0;
    JsonRecord rec;
    rec.add("run", run).add("seed", static_cast<std::int64_t>(in.seed)).add("best_lr", table.lrs[best])
        .add("best_delta_acc", d);
    sink.record(rec);
  }
  JsonRecord summary;
  summary.add("runs", inputs.size()).add("positive", positive).add("negative", negative)
      .add("mean_best_delta_acc", mean(best_deltas))
      .add("sign_test_p", positive + negative == 0 ? kNaN : bench::sign_test(positive, negative));
  sink.record(summary);
  sink.flush(out, log);
}

void cmd_topk(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const auto thresholds = config.reals("topk_d12");
  const auto inputs = load_inputs(config, log);
  Sink sink(config, "topk");
  const std::size_t classes = inputs.front().params.spec().num_classes();
  std::string header = "run,seed,d12,n_subset";
  for (std::size_t k = 1; k <= classes; ++k) header += ",top" + std::to_string(k);
  sink.csv_header(header);
  for (std::size_t run = 0; run < inputs.size(); ++run) {
    const auto& in = inputs[run];
    for (double d12 : thresholds) {
      const auto part = bench::partition_uncertain(in.params, in.test, d12);
      const auto sub = bench::subset(in.test, part.uncertain);
      std::vector<double> acc;
      for (std::size_t k = 1; k <= classes; ++k) acc.push_back(bench::topk_accuracy(in.params, sub, k));
      JsonRecord rec;
      rec.add("run", run).add("seed", static_cast<std::int64_t>(in.seed)).add("d12", d12)
          .add("n_subset", sub.size()).add("topk", acc)
          .add("top2_minus_top1", sub.empty() ? kNaN : acc[1] - acc[0]);
      sink.record(rec);
      std::string row = run_prefix(run, in.seed) + ',' + bench::format_number(d12) + ',' + std::to_string(sub.size());
      for (double a : acc) row += ',' + bench::format_number(a);
      sink.csv_row(row);
    }
  }
  sink.flush(out, log);
}

void cmd_single_vs_multi(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const auto focus = config.focus_config();
  const auto options = config.eval_options();
  const auto powers = config.ints("powers");
  const auto inputs = load_inputs(config, log);
  Sink sink(config, "single-vs-multi");
  sink.csv_header(bench::report_csv_header("run,seed,arm,power"));
  std::vector<double> multi;
  std::vector<std::vector<double>> single(powers.size());
  for (std::size_t run = 0; run < inputs.size(); ++run) {
    const auto& in = inputs[run];
    const auto cmp = bench::single_vs_multi(in.params, in.test, focus, focus.eta, config.count("t_multi"), powers,
                                            options);
    multi.push_back(cmp.multi.delta_acc);
    JsonRecord rec;
    rec.add("run", run).add("seed", static_cast<std::int64_t>(in.seed)).add("arm", "multi")
        .add("report", bench::report_record(cmp.multi));
    sink.record(rec);
    sink.csv_row(bench::report_csv_row(cmp.multi, run_prefix(run, in.seed) + ",multi,"));
    for (std::size_t i = 0; i < powers.size(); ++i) {
      single[i].push_back(cmp.single[i].delta_acc);
      JsonRecord srec;
      srec.add("run", run).add("seed", static_cast<std::int64_t>(in.seed)).add("arm", "single")
          .add("power", powers[i]).add("report", bench::report_record(cmp.single[i]));
      sink.record(srec);
      sink.csv_row(bench::report_csv_row(cmp.single[i],
                                         run_prefix(run, in.seed) + ",single," + std::to_string(powers[i])));
    }
  }
  const double multi_se = std_error(multi);
  for (std::size_t i = 0; i < powers.size(); ++i) {
    const double single_se = std_error(single[i]);
    JsonRecord rec;
    rec.add("power", powers[i]).add("mean_single", mean(single[i])).add("mean_multi", mean(multi))
        .add("difference", mean(single[i]) - mean(multi))
        .add("pooled_se", std::sqrt(single_se * single_se + multi_se * multi_se));
    sink.record(rec);
  }
  sink.flush(out, log);
}

void cmd_theory_curve(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const auto rows = theory::coefficient_curve(config.count("resolution"));
  std::ostringstream csv;
  theory::write_curve_csv(csv, rows);
  Sink::write(out / "theory_curve.csv", csv.str(), log);
  Sink sink(config, "theory-curve");
  const auto third = theory::coefficients_at(1.0 / 3.0);
  const auto half = theory::coefficients_at(0.5);
  JsonRecord rec;
  rec.add("rows", rows.size()).add("g_a_at_third", third.g_a).add("g_b_at_third", third.g_b)
      .add("g_a_at_half", half.g_a).add("g_b_at_half", half.g_b);
  sink.record(rec);
  sink.flush(out, log);
}

void cmd_theory_grads(const RunConfig& config, const fs::path& out, std::ostream& log) {
  theory::ToyModel model;
  const auto c = config.reals("toy_c");
  const auto x = config.reals("toy_x");
  std::copy(c.begin(), c.end(), model.c.begin());
  std::copy(x.begin(), x.end(), model.x.begin());
  try {
    model.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid toy model: ") + e.what());
  }
  std::vector<theory::ToyLoss> losses{{theory::ToyLossKind::kIfoUnweighted}, {theory::ToyLossKind::kDofo}};
  for (std::size_t j = 0; j < 3; ++j) {
    losses.push_back({theory::ToyLossKind::kSinglePlus, j});
    losses.push_back({theory::ToyLossKind::kSingleMinus, j});
  }
  losses.push_back({theory::ToyLossKind::kEntropy});

  Sink sink(config, "theory-grads");
  sink.csv_header("loss,dc0,dc1,dc2,dc3,dc4,dc5,dc6,shared_pathway");
  for (const auto& loss : losses) {
    const auto g = theory::toy_grad(model, loss);
    const std::vector<double> dc(g.dc.begin(), g.dc.end());
    JsonRecord rec;
    rec.add("loss", std::string_view(theory::describe(loss))).add("dc", dc).add("shared_pathway", g.shared_pathway);
    sink.record(rec);
    std::string row = theory::describe(loss);
    for (double v : dc) row += ',' + bench::format_number(v);
    sink.csv_row(row + ',' + bench::format_number(g.shared_pathway));
  }
  const auto amp = theory::amplification_report(model);
  JsonRecord rec;
  rec.add("ifo_pathway", amp.ifo_pathway).add("single_pathway", amp.single_pathway)
      .add("entropy_pathway", amp.entropy_pathway).add("dofo_pathway", amp.dofo_pathway)
      .add("same_sign", amp.same_sign).add("ifo_amplifies", amp.ifo_amplifies);
  sink.record(rec);
  sink.flush(out, log);
}

using Handler = void (*)(const RunConfig&, const fs::path&, std::ostream&);

struct Command {
  std::string name;
  Handler run;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> kCommands = {
      {"gen-data", cmd_gen_data},       {"train", cmd_train},
      {"eval", cmd_eval},               {"sweep", cmd_sweep},
      {"lr-sweep", cmd_lr_sweep},       {"topk", cmd_topk},
      {"single-vs-multi", cmd_single_vs_multi}, {"theory-curve", cmd_theory_curve},
      {"theory-grads", cmd_theory_grads},
  };
  return kCommands;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    for (const auto& c : commands()) names.push_back(c.name);
    return names;
  }();
  return kNames;
}

int run_command(std::string_view command, const RunConfig& config, std::ostream& log, std::ostream& err) {
  const auto it = std::find_if(commands().begin(), commands().end(),
                               [&](const Command& c) { return c.name == command; });
  try {
    if (it == commands().end()) throw ConfigError("unknown command: '" + std::string(command) + "'");
    config.validate();
    if (config.raw("out").empty()) throw ConfigError("an output directory is required (out)");
    try {
      simd::select_isa(simd::parse_isa(config.raw("isa")));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    const fs::path out(config.raw("out"));
    fs::create_directories(out);
    it->run(config, out, log);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace focus::cli
