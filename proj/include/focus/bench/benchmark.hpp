#pragma once

#include <cstdint>
#include <vector>

#include "focus/bench/dataset.hpp"
#include "focus/net/mlp.hpp"

namespace focus::bench {

// A synthetic dataset plus the recipe for the frozen base classifier.
struct BenchmarkSpec {
  DatasetSpec data;
  std::vector<std::size_t> hidden{32, 32};
  net::TrainConfig train;
  double test_fraction = 0.5;
};

struct BenchmarkInstance {
  Dataset train;
  Dataset test;
  net::Parameters params;
  double train_accuracy = 0.0;
};

// Uses `seed` for data, initialization and training (spec seeds are replaced).
BenchmarkInstance make_benchmark(const BenchmarkSpec& spec, std::uint64_t seed);

net::MlpSpec mlp_for(const BenchmarkSpec& spec, std::uint64_t seed);

}  // namespace focus::bench
