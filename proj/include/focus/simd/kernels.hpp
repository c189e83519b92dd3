#pragma once

// Dense double-precision kernels used by the affine layers, the optimizer and
// the learning-rate replay. Each kernel has a scalar reference implementation
// and vectorized variants (AVX2+FMA on x86-64, NEON on AArch64). The variant is
// picked once at startup from the CPU's feature flags and can be overridden.
//
// Element-wise kernels (axpy, scale) are bit-identical across variants.
// Reductions (dot, sum_squares) reassociate the sum and agree with the scalar
// reference to a few ulps of the summed magnitudes.

#include <cstddef>
#include <span>
#include <string_view>

namespace focus::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
const KernelTable& table();
}
#endif
#if defined(__aarch64__)
namespace neon {
const KernelTable& table();
}
#endif

// Best variant the running CPU supports.
Isa detect_isa();
bool isa_supported(Isa isa);

// Active table. Selection is process-global; switch only while no kernels run.
const KernelTable& active();
// Throws std::invalid_argument if the CPU lacks the requested ISA.
void select_isa(Isa isa);
Isa parse_isa(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void scale(double alpha, std::span<double> x) {
  active().scale(alpha, x.data(), x.size());
}

inline double sum_squares(std::span<const double> x) {
  return active().sum_squares(x.data(), x.size());
}

// out[r] = bias[r] + dot(W[r, :], x) for a row-major rows x cols matrix.
void gemv(std::span<const double> weights, std::span<const double> bias,
          std::span<const double> x, std::span<double> out);

// out += W^T g for a row-major rows x cols matrix.
void gemv_transposed_accumulate(std::span<const double> weights,
                                std::span<const double> g,
                                std::span<double> out);

// G += scale * g x^T for a row-major rows x cols matrix G.
void rank1_accumulate(double scale, std::span<const double> g,
                      std::span<const double> x, std::span<double> grad);

}  // namespace focus::simd
