#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace focus::net {

// Fully connected ReLU network: widths = (input, hidden..., classes).
struct MlpSpec {
  std::vector<std::size_t> layer_widths;
  std::uint64_t seed = 0;

  std::size_t input_width() const { return layer_widths.front(); }
  std::size_t num_classes() const { return layer_widths.back(); }
  std::size_t num_layers() const { return layer_widths.size() - 1; }

  // Throws DomainError unless there are >= 2 positive widths and >= 2 classes.
  void validate() const;
  std::size_t parameter_count() const;

  bool operator==(const MlpSpec&) const = default;
};

// Location of one affine layer inside the flat parameter vector. Weights are
// row-major (out x in) and followed directly by the out biases.
struct AffineLayout {
  std::size_t weight_offset;
  std::size_t bias_offset;
  std::size_t in;
  std::size_t out;
};

std::vector<AffineLayout> layer_layouts(const MlpSpec& spec);

// Flat weights and biases of an MlpSpec network.
class Parameters {
 public:
  Parameters() = default;
  // Zero-filled parameters for a validated spec.
  explicit Parameters(MlpSpec spec);
  // Throws ShapeError if values.size() != spec.parameter_count().
  Parameters(MlpSpec spec, std::vector<double> values);

  const MlpSpec& spec() const { return spec_; }
  const std::vector<AffineLayout>& layouts() const { return layouts_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> bias(std::size_t layer) const;

  bool all_finite() const;

  // Bitwise comparison, so +0/-0 and NaN payloads count as different.
  bool bit_equal(const Parameters& other) const;

 private:
  MlpSpec spec_;
  std::vector<AffineLayout> layouts_;
  std::vector<double> values_;
};

}  // namespace focus::net
