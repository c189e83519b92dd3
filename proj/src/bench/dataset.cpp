#include "focus/bench/dataset.hpp"

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

namespace focus::bench {

void DatasetSpec::validate() const {
  if (num_classes < 3) throw DomainError("dataset needs at least 3 classes");
  if (dims_per_class < 1) throw DomainError("dims_per_class must be >= 1");
  if (feature_dim < num_classes * dims_per_class) {
    throw DomainError("feature_dim must be >= num_classes * dims_per_class");
  }
  if (!(noise_scale > 0.0)) throw DomainError("noise_scale must be positive");
  if (!(class_separation >= 0.0)) throw DomainError("class_separation must be >= 0");
  if (!(confusion_pull >= 0.0 && confusion_pull < 0.5)) {
    throw DomainError("confusion_pull must lie in [0, 0.5)");
  }
  for (const auto& [a, b] : confusion_pairs) {
    if (a >= num_classes || b >= num_classes || a == b) {
      throw DomainError("confusion pairs must name two distinct valid classes");
    }
  }
}

std::vector<std::vector<double>> class_means(const DatasetSpec& spec) {
  spec.validate();
  const std::size_t m = spec.dims_per_class;
  const double level = spec.class_separation / std::sqrt(2.0 * static_cast<double>(m));
  std::vector<std::vector<double>> base(spec.num_classes, std::vector<double>(spec.feature_dim, 0.0));
  for (std::size_t k = 0; k < spec.num_classes; ++k) {
    std::fill_n(base[k].begin() + static_cast<std::ptrdiff_t>(k * m), m, level);
  }
  auto means = base;
  for (const auto& [a, b] : spec.confusion_pairs) {
    for (std::size_t d = 0; d < spec.feature_dim; ++d) {
      const double diff = base[b][d] - base[a][d];
      means[a][d] += spec.confusion_pull * diff;
      means[b][d] -= spec.confusion_pull * diff;
    }
  }
  return means;
}

Dataset gen_synthetic(const DatasetSpec& spec) {
  const auto means = class_means(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_scale);

  Dataset out{spec.num_classes, spec.feature_dim, {}};
  out.samples.reserve(spec.num_classes * spec.samples_per_class);
  for (std::size_t k = 0; k < spec.num_classes; ++k) {
    for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
      LabeledSample s{means[k], k};
      for (double& v : s.features) v += noise(rng);
      out.samples.push_back(std::move(s));
    }
  }
  std::shuffle(out.samples.begin(), out.samples.end(), rng);
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double test_fraction,
                                          std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) throw DomainError("test_fraction must lie in [0, 1]");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_first = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(data.size())));
  const std::span<const std::size_t> all(order);
  return {subset(data, all.first(n_first)), subset(data, all.subspan(n_first))};
}

Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out{data.num_classes, data.feature_dim, {}};
  out.samples.reserve(indices.size());
  for (std::size_t i : indices) out.samples.push_back(data.samples.at(i));
  return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "label";
  for (std::size_t d = 0; d < data.feature_dim; ++d) out << ",f" << d;
  out << '\n';
  char buf[32];
  for (const auto& s : data.samples) {
    out << s.label;
    for (double v : s.features) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in, std::size_t num_classes) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("dataset CSV is empty");
  std::size_t columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (line.rfind("label", 0) != 0 || columns < 2) throw DomainError("dataset CSV header must start with label,f0");

  Dataset out{0, columns - 1, {}};
  std::size_t max_label = 0;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    LabeledSample s;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      if (first) {
        const long long label = std::strtoll(cell.c_str(), &end, 10);
        if (end == cell.c_str() || *end != '\0' || label < 0) {
          throw DomainError("bad label on CSV row " + std::to_string(row));
        }
        s.label = static_cast<std::size_t>(label);
        first = false;
      } else {
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0') throw DomainError("bad value on CSV row " + std::to_string(row));
        s.features.push_back(v);
      }
    }
    if (s.features.size() != out.feature_dim) throw DomainError("wrong column count on CSV row " + std::to_string(row));
    max_label = std::max(max_label, s.label);
    out.samples.push_back(std::move(s));
  }
  out.num_classes = std::max(num_classes, out.samples.empty() ? 0 : max_label + 1);
  return out;
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_dataset_csv(out, data);
}

Dataset load_dataset(const std::string& path, std::size_t num_classes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_dataset_csv(in, num_classes);
}

}  // namespace focus::bench
