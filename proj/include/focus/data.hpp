#pragma once

#include <cstddef>
#include <vector>

namespace focus {

struct LabeledSample {
  std::vector<double> features;
  std::size_t label = 0;
};

struct Dataset {
  std::size_t num_classes = 0;
  std::size_t feature_dim = 0;
  std::vector<LabeledSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

}  // namespace focus
