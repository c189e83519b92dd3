#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "focus/data.hpp"

namespace focus::bench {

// Gaussian clusters, one per class. Class k owns the block of
// dims_per_class coordinates starting at k * dims_per_class; its mean is
// separation / sqrt(2 * dims_per_class) on that block and 0 elsewhere, so any
// two means are `separation` apart. The remaining coordinates carry only
// noise. For every confusion pair (a, b) both means move a fraction
// `confusion_pull` of the way towards each other, which mixes part of each
// class's evidence into the other and produces samples whose top-2 classes
// are close.
struct DatasetSpec {
  std::size_t num_classes = 5;
  std::size_t samples_per_class = 2000;
  std::size_t feature_dim = 100;
  std::size_t dims_per_class = 4;
  double class_separation = 3.5;
  std::vector<std::pair<std::size_t, std::size_t>> confusion_pairs{{0, 1}, {2, 3}};
  double confusion_pull = 0.4;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;

  // Throws DomainError unless K >= 3, dims_per_class >= 1,
  // feature_dim >= K * dims_per_class, noise_scale > 0,
  // confusion_pull in [0, 0.5) and pairs name distinct valid classes.
  void validate() const;
};

// Class means after applying the confusion pairs, row per class.
std::vector<std::vector<double>> class_means(const DatasetSpec& spec);

// Balanced, shuffled, deterministic in spec.seed.
Dataset gen_synthetic(const DatasetSpec& spec);

// Deterministic split; the first part holds round(test_fraction * n) samples
// drawn after a seeded shuffle.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double test_fraction,
                                          std::uint64_t seed);

Dataset subset(const Dataset& data, std::span<const std::size_t> indices);

// Header `label,f0,f1,...`; values printed with 17 significant digits.
void write_dataset_csv(std::ostream& out, const Dataset& data);
// Throws DomainError on malformed input. num_classes is max label + 1 unless
// a larger value is passed.
Dataset read_dataset_csv(std::istream& in, std::size_t num_classes = 0);
void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path, std::size_t num_classes = 0);

}  // namespace focus::bench
