#include "focus/cli/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "focus/error.hpp"
#include "focus/simd/kernels.hpp"

namespace focus::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("invalid value for '" + std::string(key) + "': '" + std::string(value) + "' (" +
                    std::string(why) + ")");
}

double parse_real(std::string_view key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(d)) bad_value(key, v, "expected a finite real");
  return d;
}

std::uint64_t parse_unsigned(std::string_view key, const std::string& v) {
  char* end = nullptr;
  if (v.empty() || v[0] == '-') bad_value(key, v, "expected a non-negative integer");
  const unsigned long long n = std::strtoull(v.c_str(), &end, 10);
  if (*end != '\0') bad_value(key, v, "expected a non-negative integer");
  return n;
}

int parse_int(std::string_view key, const std::string& v) {
  char* end = nullptr;
  const long n = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') bad_value(key, v, "expected an integer");
  return static_cast<int>(n);
}

}  // namespace

const std::vector<KeyInfo>& known_keys() {
  static const std::vector<KeyInfo> kKeys = {
      // synthetic data
      {"num_classes", "5", "number of classes K (>= 3)"},
      {"samples_per_class", "2000", "samples generated per class"},
      {"feature_dim", "100", "feature dimension (>= K * dims_per_class); extra dims are pure noise"},
      {"dims_per_class", "4", "coordinates carrying each class's mean"},
      {"class_separation", "3.5", "distance between class means"},
      {"confusion_pairs", "0-1,2-3", "class pairs pulled together, e.g. 0-1,2-3"},
      {"confusion_pull", "0.4", "fraction each paired mean moves towards its partner, [0, 0.5)"},
      {"noise_scale", "1", "per-dimension Gaussian noise standard deviation (> 0)"},
      {"test_fraction", "0.5", "share of generated samples held out for evaluation"},
      // base classifier
      {"hidden", "32,32", "hidden layer widths"},
      {"epochs", "30", "base training epochs"},
      {"train_lr", "0.05", "base training learning rate"},
      {"batch_size", "32", "base training mini-batch size"},
      {"train_clip", "0", "gradient-norm clip during base training (0 = off)"},
      // focus refinement
      {"eta", "1", "focus learning rate"},
      {"iterations", "1", "focus gradient steps T"},
      {"n_f", "2", "number of focus classes (>= 2)"},
      {"d12", "0.16", "uncertainty threshold on the top-2 probability gap"},
      {"loss", "ifo", "ifo, dofo, entropy or ce_focus"},
      {"weighted", "true", "probability-weight ifo / ce_focus terms"},
      {"clip_norm", "1", "gradient-norm clip for focus steps (0 = off)"},
      // sweeps
      {"base_lr", "0.0078125", "first learning rate of lr-sweep"},
      {"factor", "2", "ratio between consecutive sweep learning rates"},
      {"count", "19", "number of sweep learning rates"},
      {"losses", "ifo,dofo,entropy,ce_focus", "loss kinds for sweep"},
      {"t_multi", "8", "iterations of the multi-step arm"},
      {"powers", "0,1,2,3", "single-step arm uses eta * 2^power"},
      {"topk_d12", "0.04,0.84", "thresholds for the top-k table"},
      {"resolution", "1000", "grid points between p = 1/3 and p = 1/2"},
      // toy model
      {"toy_c", "1,1,1,0,1,1,1", "toy coefficients c0..c6"},
      {"toy_x", "1,1,1,1", "toy features x0..x3"},
      // run control and files
      {"seed", "0", "seed for data, initialization and training"},
      {"runs", "1", "benchmark runs; run r uses seed + r (in-memory benchmarks only)"},
      {"max_samples", "20000", "cap on evaluated uncertain samples"},
      {"jobs", "1", "worker threads for evaluation"},
      {"isa", "auto", "kernel variant: auto, scalar, avx2, neon"},
      {"train_data", "", "training CSV (train)"},
      {"test_data", "", "evaluation CSV (eval, sweeps, topk)"},
      {"model", "", "checkpoint file (eval, sweeps, topk)"},
      {"out", "", "output directory (required)"},
  };
  return kKeys;
}

RunConfig::RunConfig() {
  for (const auto& k : known_keys()) entries_.emplace_back(k.name, k.default_value);
}

void RunConfig::set(std::string_view key, std::string value) {
  for (auto& [name, v] : entries_) {
    if (name == key) {
      v = trim(value);
      return;
    }
  }
  throw ConfigError("unknown config key: '" + std::string(key) + "'");
}

const std::string& RunConfig::raw(std::string_view key) const {
  for (const auto& [name, v] : entries_) {
    if (name == key) return v;
  }
  throw ConfigError("unknown config key: '" + std::string(key) + "'");
}

double RunConfig::real(std::string_view key) const { return parse_real(key, raw(key)); }

std::size_t RunConfig::count(std::string_view key) const {
  return static_cast<std::size_t>(parse_unsigned(key, raw(key)));
}

std::uint64_t RunConfig::seed() const { return parse_unsigned("seed", raw("seed")); }

bool RunConfig::flag(std::string_view key) const {
  const std::string& v = raw(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "expected true/false");
}

std::vector<double> RunConfig::reals(std::string_view key) const {
  std::vector<double> out;
  for (const auto& part : split(raw(key), ',')) out.push_back(parse_real(key, part));
  return out;
}

std::vector<int> RunConfig::ints(std::string_view key) const {
  std::vector<int> out;
  for (const auto& part : split(raw(key), ',')) out.push_back(parse_int(key, part));
  return out;
}

std::vector<std::size_t> RunConfig::counts(std::string_view key) const {
  std::vector<std::size_t> out;
  for (const auto& part : split(raw(key), ',')) out.push_back(parse_unsigned(key, part));
  return out;
}

std::vector<std::string> RunConfig::words(std::string_view key) const { return split(raw(key), ','); }

bench::BenchmarkSpec RunConfig::benchmark_spec() const {
  bench::BenchmarkSpec spec;
  auto& d = spec.data;
  d.num_classes = count("num_classes");
  d.samples_per_class = count("samples_per_class");
  d.feature_dim = count("feature_dim");
  d.dims_per_class = count("dims_per_class");
  d.class_separation = real("class_separation");
  d.confusion_pull = real("confusion_pull");
  d.noise_scale = real("noise_scale");
  d.seed = seed();
  d.confusion_pairs.clear();
  for (const auto& pair : words("confusion_pairs")) {
    const auto ends = split(pair, '-');
    if (ends.size() != 2) bad_value("confusion_pairs", pair, "expected a-b");
    d.confusion_pairs.emplace_back(parse_unsigned("confusion_pairs", ends[0]),
                                   parse_unsigned("confusion_pairs", ends[1]));
  }
  spec.hidden = counts("hidden");
  spec.train.epochs = count("epochs");
  spec.train.lr = real("train_lr");
  spec.train.batch_size = count("batch_size");
  spec.train.clip_norm = real("train_clip");
  spec.train.seed = seed();
  spec.test_fraction = real("test_fraction");
  return spec;
}

refine::FocusConfig RunConfig::focus_config() const {
  refine::FocusConfig c;
  c.eta = real("eta");
  c.iterations = count("iterations");
  c.focus_count = count("n_f");
  c.gap_threshold = real("d12");
  try {
    c.loss = refine::parse_loss_kind(raw("loss"));
  } catch (const DomainError& e) {
    bad_value("loss", raw("loss"), "expected ifo, dofo, entropy or ce_focus");
  }
  c.weighted = flag("weighted");
  c.clip_norm = real("clip_norm");
  return c;
}

bench::EvalOptions RunConfig::eval_options() const {
  return bench::EvalOptions{count("max_samples"), count("jobs")};
}

void RunConfig::validate() const {
  auto require = [](bool ok, std::string_view key, const std::string& v, std::string_view why) {
    if (!ok) bad_value(key, v, why);
  };
  const auto spec = benchmark_spec();
  try {
    spec.data.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid dataset settings: ") + e.what());
  }
  require(spec.data.samples_per_class >= 1, "samples_per_class", raw("samples_per_class"), "must be >= 1");
  for (std::size_t h : spec.hidden) require(h >= 1, "hidden", raw("hidden"), "widths must be >= 1");
  require(spec.train.lr > 0.0, "train_lr", raw("train_lr"), "must be > 0");
  require(spec.train.batch_size >= 1, "batch_size", raw("batch_size"), "must be >= 1");
  require(spec.train.clip_norm >= 0.0, "train_clip", raw("train_clip"), "must be >= 0");
  require(spec.test_fraction > 0.0 && spec.test_fraction < 1.0, "test_fraction", raw("test_fraction"),
          "must lie in (0, 1)");

  const auto fc = focus_config();
  require(fc.eta >= 0.0, "eta", raw("eta"), "must be >= 0");
  require(fc.iterations >= 1, "iterations", raw("iterations"), "must be >= 1");
  require(fc.focus_count >= 2, "n_f", raw("n_f"), "must be >= 2 (focus on at least the two most likely classes)");
  try {
    fc.validate(spec.data.num_classes);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid focus settings: ") + e.what());
  }

  require(real("base_lr") >= 0.0, "base_lr", raw("base_lr"), "must be >= 0");
  require(real("factor") > 0.0, "factor", raw("factor"), "must be > 0");
  require(count("count") >= 1, "count", raw("count"), "must be >= 1");
  for (const auto& w : words("losses")) {
    try {
      refine::parse_loss_kind(w);
    } catch (const DomainError&) {
      bad_value("losses", raw("losses"), "unknown loss kind " + w);
    }
  }
  require(count("t_multi") >= 1, "t_multi", raw("t_multi"), "must be >= 1");
  ints("powers");
  for (double t : reals("topk_d12")) require(t >= 0.0 && t <= 1.0, "topk_d12", raw("topk_d12"), "thresholds must lie in [0, 1]");
  require(count("resolution") >= 2, "resolution", raw("resolution"), "must be >= 2");
  require(reals("toy_c").size() == 7, "toy_c", raw("toy_c"), "expected 7 coefficients");
  require(reals("toy_x").size() == 4, "toy_x", raw("toy_x"), "expected 4 features");
  seed();
  require(count("runs") >= 1, "runs", raw("runs"), "must be >= 1");
  require(count("max_samples") >= 1, "max_samples", raw("max_samples"), "must be >= 1");
  require(count("jobs") >= 1, "jobs", raw("jobs"), "must be >= 1");
  try {
    simd::parse_isa(raw("isa"));
  } catch (const std::invalid_argument&) {
    bad_value("isa", raw("isa"), "expected auto, scalar, avx2 or neon");
  }
}

bench::JsonRecord RunConfig::echo() const {
  bench::JsonRecord rec;
  for (const auto& [name, v] : entries_) rec.add(name, std::string_view(v));
  return rec;
}

RunConfig parse_config_text(std::istream& in, RunConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  return parse_config_text(in, std::move(base));
}

}  // namespace focus::cli
