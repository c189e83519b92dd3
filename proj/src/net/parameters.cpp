#include "focus/net/parameters.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "focus/error.hpp"

namespace focus::net {

void MlpSpec::validate() const {
  if (layer_widths.size() < 2) throw DomainError("an MLP needs at least an input and an output width");
  for (std::size_t w : layer_widths) {
    if (w == 0) throw DomainError("layer widths must be positive");
  }
  if (layer_widths.back() < 2) throw DomainError("a classifier needs at least 2 classes");
}

std::size_t MlpSpec::parameter_count() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_widths.size(); ++l) {
    total += layer_widths[l] * layer_widths[l + 1] + layer_widths[l + 1];
  }
  return total;
}

std::vector<AffineLayout> layer_layouts(const MlpSpec& spec) {
  std::vector<AffineLayout> out;
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < spec.layer_widths.size(); ++l) {
    const std::size_t in = spec.layer_widths[l];
    const std::size_t n = spec.layer_widths[l + 1];
    out.push_back(AffineLayout{offset, offset + in * n, in, n});
    offset += in * n + n;
  }
  return out;
}

Parameters::Parameters(MlpSpec spec)
    : spec_(std::move(spec)),
      layouts_(layer_layouts(spec_)),
      values_(spec_.parameter_count(), 0.0) {
  spec_.validate();
}

Parameters::Parameters(MlpSpec spec, std::vector<double> values)
    : spec_(std::move(spec)), layouts_(layer_layouts(spec_)), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.parameter_count()) {
    throw ShapeError("parameter vector has " + std::to_string(values_.size()) +
                     " entries, spec needs " + std::to_string(spec_.parameter_count()));
  }
}

std::span<const double> Parameters::weights(std::size_t layer) const {
  const AffineLayout& l = layouts_.at(layer);
  return std::span<const double>(values_).subspan(l.weight_offset, l.in * l.out);
}

std::span<const double> Parameters::bias(std::size_t layer) const {
  const AffineLayout& l = layouts_.at(layer);
  return std::span<const double>(values_).subspan(l.bias_offset, l.out);
}

bool Parameters::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool Parameters::bit_equal(const Parameters& other) const {
  return spec_ == other.spec_ && values_.size() == other.values_.size() &&
         (values_.empty() ||
          std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(double)) == 0);
}

}  // namespace focus::net
