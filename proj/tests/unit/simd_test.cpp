#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "focus/simd/kernels.hpp"

using namespace focus::simd;

namespace {

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
#if defined(__x86_64__) || defined(_M_X64)
  if (isa_supported(Isa::kAvx2)) out.push_back(&avx2::table());
#endif
#if defined(__aarch64__)
  if (isa_supported(Isa::kNeon)) out.push_back(&neon::table());
#endif
  return out;
}

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double abs_sum_product(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] * b[i]);
  return s;
}

}  // namespace

TEST(Simd, ScalarReferenceValues) {
  const auto& t = scalar::table();
  const double a[] = {1, 2, 3, 4, 5};
  const double b[] = {5, 4, 3, 2, 1};
  EXPECT_EQ(t.dot(a, b, 5), 35.0);
  EXPECT_EQ(t.sum_squares(a, 5), 55.0);
  double y[] = {1, 1, 1, 1, 1};
  t.axpy(2.0, a, y, 5);
  EXPECT_EQ(y[4], 11.0);
  t.scale(0.5, y, 5);
  EXPECT_EQ(y[0], 1.5);
  EXPECT_EQ(t.dot(a, b, 0), 0.0);
}

TEST(Simd, VariantsMatchScalarAcrossLengths) {
  const auto tables = vector_tables();
  if (tables.empty()) GTEST_SKIP() << "no vector ISA on this CPU";
  std::mt19937_64 rng(11);
  const auto& ref = scalar::table();
  for (const auto* t : tables) {
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto a = random_vec(rng, n);
      const auto b = random_vec(rng, n);
      const double tol = 1e-14 * (abs_sum_product(a, b) + 1.0);
      EXPECT_NEAR(t->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), tol) << n;
      EXPECT_NEAR(t->sum_squares(a.data(), n), ref.sum_squares(a.data(), n),
                  1e-14 * (abs_sum_product(a, a) + 1.0))
          << n;

      auto y1 = b, y2 = b;
      ref.axpy(0.37, a.data(), y1.data(), n);
      t->axpy(0.37, a.data(), y2.data(), n);
      EXPECT_EQ(y1, y2) << "axpy n=" << n;

      auto s1 = a, s2 = a;
      ref.scale(-1.9, s1.data(), n);
      t->scale(-1.9, s2.data(), n);
      EXPECT_EQ(s1, s2) << "scale n=" << n;
    }
  }
}

TEST(Simd, UnalignedTails) {
  const auto tables = vector_tables();
  if (tables.empty()) GTEST_SKIP() << "no vector ISA on this CPU";
  std::mt19937_64 rng(5);
  const auto base = random_vec(rng, 40);
  for (const auto* t : tables) {
    for (std::size_t off = 1; off < 4; ++off) {
      const std::size_t n = 40 - off;
      auto y1 = base, y2 = base;
      scalar::table().axpy(1.5, base.data() + off, y1.data() + off, n);
      t->axpy(1.5, base.data() + off, y2.data() + off, n);
      EXPECT_EQ(y1, y2);
    }
  }
}

TEST(Simd, DispatchSelectAndParse) {
  const Isa before = active().isa;
  EXPECT_TRUE(isa_supported(Isa::kScalar));
  EXPECT_TRUE(isa_supported(detect_isa()));
  select_isa(Isa::kScalar);
  EXPECT_EQ(active().isa, Isa::kScalar);
  EXPECT_EQ(parse_isa("scalar"), Isa::kScalar);
  EXPECT_EQ(parse_isa(isa_name(Isa::kAvx2)), Isa::kAvx2);
  EXPECT_THROW(parse_isa("sse9"), std::invalid_argument);
#if defined(__x86_64__)
  EXPECT_THROW(select_isa(Isa::kNeon), std::invalid_argument);
#endif
  select_isa(before);
}

TEST(Simd, GemvHelpers) {
  const std::vector<double> w{1, 2, 3, 4, 5, 6};  // 2 x 3
  const std::vector<double> bias{0.5, -1};
  const std::vector<double> x{1, 0, -1};
  std::vector<double> out(2);
  gemv(w, bias, x, out);
  EXPECT_EQ(out[0], -1.5);
  EXPECT_EQ(out[1], -3.0);

  std::vector<double> back(3, 0.0);
  gemv_transposed_accumulate(w, std::vector<double>{1, 1}, back);
  EXPECT_EQ(back, (std::vector<double>{5, 7, 9}));

  std::vector<double> g(6, 0.0);
  rank1_accumulate(2.0, std::vector<double>{1, -1}, x, g);
  EXPECT_EQ(g, (std::vector<double>{2, 0, -2, -2, 0, 2}));
}
