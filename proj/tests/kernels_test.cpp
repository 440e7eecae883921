#include "mdepth/kernels.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace mdepth::kernels;
namespace ts = testing_support;

namespace {

struct RowData {
  std::vector<double> a, b, c, d;
};

// Squared distances from random points, with a few exact ties and zeros so
// that comparison edge cases reach both the vector body and the tail.
RowData make_row(std::size_t count, std::mt19937_64& g) {
  std::normal_distribution<double> z;
  RowData r;
  for (std::size_t t = 0; t < count; ++t) {
    double x = std::abs(z(g)) + 0.1, y = std::abs(z(g)) + 0.1, w = std::abs(z(g));
    if (t % 7 == 3) y = x;
    if (t % 11 == 5) w = 0.0;
    r.a.push_back(x);
    r.b.push_back(y);
    r.c.push_back(w);
    r.d.push_back(x + y);
  }
  return r;
}

}  // namespace

TEST(KernelDispatch, ScalarAlwaysAvailable) {
  EXPECT_TRUE(isa_available(Isa::Scalar));
  EXPECT_EQ(isa_name(Isa::Scalar), "scalar");
  const Isa before = active_isa();
  set_active_isa(Isa::Scalar);
  EXPECT_EQ(active_isa(), Isa::Scalar);
  set_active_isa(before);
}

#if defined(MDEPTH_HAVE_AVX2)

class Avx2Equivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!isa_available(Isa::Avx2)) GTEST_SKIP() << "CPU lacks AVX2/FMA";
  }
};

TEST_F(Avx2Equivalence, CountingKernelsAgreeExactly) {
  auto g = ts::rng(10);
  for (std::size_t count : {0u, 1u, 3u, 4u, 5u, 8u, 13u, 64u, 101u}) {
    const RowData r = make_row(count, g);
    EXPECT_EQ(scalar::less_equal_count(r.a.data(), r.b.data(), count),
              avx2::less_equal_count(r.a.data(), r.b.data(), count));
    for (double qi : {0.0, 0.5, 1.0, 3.0}) {
      EXPECT_EQ(scalar::lens_row(qi, r.a.data(), r.d.data(), count),
                avx2::lens_row(qi, r.a.data(), r.d.data(), count));
    }
  }
}

TEST_F(Avx2Equivalence, SummingKernelsAgreeToRounding) {
  auto g = ts::rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 12;
    const auto pts = ts::gaussian_points(n, 3, g);
    const auto x = ts::gaussian_points(1, 3, g)[0];
    std::vector<double> q2, qj, dik2, djk2, qk2;
    const std::size_t i = 0, j = 1;
    for (std::size_t k = 2; k < n; ++k) {
      qk2.push_back((pts[k] - x).squaredNorm());
      dik2.push_back((pts[i] - pts[k]).squaredNorm());
      djk2.push_back((pts[j] - pts[k]).squaredNorm());
      qj.push_back((pts[k] - x).norm());
    }
    const double qi2 = (pts[i] - x).squaredNorm();
    const double qj2 = (pts[j] - x).squaredNorm();
    const double dij2 = (pts[i] - pts[j]).squaredNorm();
    const std::size_t count = qk2.size();

    const Oja3Sum s = scalar::oja3_row(qi2, qj2, dij2, qk2.data(), dik2.data(), djk2.data(), count);
    const Oja3Sum v = avx2::oja3_row(qi2, qj2, dij2, qk2.data(), dik2.data(), djk2.data(), count);
    EXPECT_NEAR(s.sum, v.sum, 1e-12 * std::max(1.0, s.sum));
    EXPECT_EQ(s.violations, v.violations);

    const double o2s = scalar::oja2_row(qi2, qk2.data(), dik2.data(), count);
    const double o2v = avx2::oja2_row(qi2, qk2.data(), dik2.data(), count);
    EXPECT_NEAR(o2s, o2v, 1e-12 * std::max(1.0, o2s));

    const double sps = scalar::spatial_row(std::sqrt(qi2), qj.data(), dik2.data(), count);
    const double spv = avx2::spatial_row(std::sqrt(qi2), qj.data(), dik2.data(), count);
    EXPECT_NEAR(sps, spv, 1e-12 * std::max(1.0, std::abs(sps)));
  }
}

TEST_F(Avx2Equivalence, Oja3ViolationsCountedInBothPaths) {
  // Distances violating the triangle inequality give strongly negative radicands.
  std::vector<double> qk2(9, 1.0), dik2(9, 1.0), djk2(9, 1.0);
  const Oja3Sum s = scalar::oja3_row(1.0, 1.0, 1e4, qk2.data(), dik2.data(), djk2.data(), 9);
  const Oja3Sum v = avx2::oja3_row(1.0, 1.0, 1e4, qk2.data(), dik2.data(), djk2.data(), 9);
  EXPECT_EQ(s.violations, 9u);
  EXPECT_EQ(v.violations, 9u);
  EXPECT_EQ(s.sum, 0.0);
  EXPECT_EQ(v.sum, 0.0);
}

TEST_F(Avx2Equivalence, DispatchedTablesMatch) {
  const KernelTable& s = table(Isa::Scalar);
  const KernelTable& v = table(Isa::Avx2);
  EXPECT_NE(s.oja3_row, v.oja3_row);
  EXPECT_EQ(s.oja3_row, &scalar::oja3_row);
  EXPECT_EQ(v.oja3_row, &avx2::oja3_row);
}

#endif
