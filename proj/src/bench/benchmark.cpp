#include "focus/bench/benchmark.hpp"

namespace focus::bench {

net::MlpSpec mlp_for(const BenchmarkSpec& spec, std::uint64_t seed) {
  net::MlpSpec mlp;
  mlp.layer_widths.push_back(spec.data.feature_dim);
  mlp.layer_widths.insert(mlp.layer_widths.end(), spec.hidden.begin(), spec.hidden.end());
  mlp.layer_widths.push_back(spec.data.num_classes);
  mlp.seed = seed;
  return mlp;
}

BenchmarkInstance make_benchmark(const BenchmarkSpec& spec, std::uint64_t seed) {
  DatasetSpec data_spec = spec.data;
  data_spec.seed = seed;
  auto [test, train] = split_dataset(gen_synthetic(data_spec), spec.test_fraction, seed);

  net::TrainConfig train_cfg = spec.train;
  train_cfg.seed = seed;
  auto report = net::train_base(mlp_for(spec, seed), train, train_cfg);
  return BenchmarkInstance{std::move(train), std::move(test), std::move(report.params),
                           report.train_accuracy};
}

}  // namespace focus::bench
