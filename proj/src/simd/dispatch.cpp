#include <atomic>
#include <stdexcept>
#include <string>

#include "focus/simd/kernels.hpp"

namespace focus::simd {
namespace {

const KernelTable& table_for(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::kAvx2:
      return avx2::table();
#endif
#if defined(__aarch64__)
    case Isa::kNeon:
      return neon::table();
#endif
    default:
      return scalar::table();
  }
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table_for(detect_isa())};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void select_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("ISA not supported on this CPU: " + std::string(isa_name(isa)));
  }
  active_slot().store(&table_for(isa), std::memory_order_release);
}

Isa parse_isa(std::string_view name) {
  if (name == "auto") return detect_isa();
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "neon") return Isa::kNeon;
  throw std::invalid_argument("unknown ISA: " + std::string(name));
}

void gemv(std::span<const double> weights, std::span<const double> bias,
          std::span<const double> x, std::span<double> out) {
  const std::size_t cols = x.size();
  const KernelTable& k = active();
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = bias[r] + k.dot(weights.data() + r * cols, x.data(), cols);
  }
}

void gemv_transposed_accumulate(std::span<const double> weights,
                                std::span<const double> g,
                                std::span<double> out) {
  const std::size_t cols = out.size();
  const KernelTable& k = active();
  for (std::size_t r = 0; r < g.size(); ++r) {
    if (g[r] != 0.0) k.axpy(g[r], weights.data() + r * cols, out.data(), cols);
  }
}

void rank1_accumulate(double scale, std::span<const double> g,
                      std::span<const double> x, std::span<double> grad) {
  const std::size_t cols = x.size();
  const KernelTable& k = active();
  for (std::size_t r = 0; r < g.size(); ++r) {
    const double coeff = scale * g[r];
    if (coeff != 0.0) k.axpy(coeff, x.data(), grad.data() + r * cols, cols);
  }
}

}  // namespace focus::simd
