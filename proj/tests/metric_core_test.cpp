#include "mdepth/errors.hpp"
#include "mdepth/metric_core.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

using namespace mdepth;
namespace ts = testing_support;

TEST(IsBetween, CollinearEquilateralAndArc) {
  EXPECT_TRUE(is_between(2, 1, 1, 1e-9));
  EXPECT_FALSE(is_between(1, 1, 1, 1e-9));
  EXPECT_TRUE(is_between(std::numbers::pi, std::numbers::pi / 2, std::numbers::pi / 2, 1e-9));
}

TEST(IsBetween, NegativeInputRejected) {
  EXPECT_THROW(is_between(-1, 1, 1, 1e-9), InvalidArgument);
  EXPECT_THROW(is_between(1, 1, 1, -1e-9), InvalidArgument);
}

TEST(B3Matrix, LineExample) {
  const Matrix3 dpair{{{0, 2, 4}, {2, 0, 2}, {4, 2, 0}}};
  const BMatrix3 b = b3_matrix({1, 1, 3}, dpair);
  const Matrix3 expected{{{1, -1, -3}, {-1, 1, 3}, {-3, 3, 9}}};
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) EXPECT_DOUBLE_EQ(b.entries[k][l], expected[k][l]);
  EXPECT_NEAR(b.determinant(), 0.0, 1e-12);
}

TEST(B3Matrix, CoincidentQueryZeroesDiagonal) {
  const Matrix3 dpair{{{0, 2, 3}, {2, 0, 2.5}, {3, 2.5, 0}}};
  const BMatrix3 b = b3_matrix({0, 2, 3}, dpair);
  EXPECT_EQ(b.entries[0][0], 0.0);
  EXPECT_DOUBLE_EQ(b.entries[0][1], 0.5 * (4 - 4));
  EXPECT_DOUBLE_EQ(b.entries[0][2], 0.5 * (9 - 9));
}

TEST(B3Matrix, GramIdentityInR3) {
  auto g = ts::rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const auto pts = ts::gaussian_points(4, 3, g);
    const Eigen::VectorXd& x = pts[0];
    std::array<double, 3> dx{};
    Matrix3 dp{};
    for (int k = 0; k < 3; ++k) {
      dx[k] = (pts[k + 1] - x).norm();
      for (int l = 0; l < 3; ++l) dp[k][l] = (pts[k + 1] - pts[l + 1]).norm();
    }
    const BMatrix3 b = b3_matrix(dx, dp);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        EXPECT_NEAR(b.entries[k][l], (pts[k + 1] - x).dot(pts[l + 1] - x), 1e-10);
  }
}

TEST(B3Matrix, ShapeValidation) {
  const Matrix3 asym{{{0, 1, 1}, {2, 0, 1}, {1, 1, 0}}};
  EXPECT_THROW(b3_matrix({1, 1, 1}, asym), InvalidArgument);
  const Matrix3 diag{{{1, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
  EXPECT_THROW(b3_matrix({1, 1, 1}, diag), InvalidArgument);
  const Matrix3 ok{{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
  EXPECT_THROW(b3_matrix({-1, 1, 1}, ok), InvalidArgument);
}

TEST(B2Matrix, Examples) {
  const BMatrix2 b = b2_matrix({1.0, std::sqrt(2.0)}, 1.0);
  EXPECT_DOUBLE_EQ(b.entries[0][0], 1.0);
  EXPECT_NEAR(b.entries[0][1], 1.0, 1e-15);
  EXPECT_NEAR(b.entries[1][1], 2.0, 1e-15);
  EXPECT_NEAR(b.determinant(), 1.0, 1e-14);

  const BMatrix2 c = b2_matrix({0.0, 3.0}, 3.0);
  EXPECT_EQ(c.entries[0][0], 0.0);
  EXPECT_DOUBLE_EQ(c.entries[1][1], 9.0);

  auto g = ts::rng(2);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 100; ++rep) {
    const double x = z(g), a = z(g), c2 = z(g);
    EXPECT_NEAR(b2_matrix({std::abs(a - x), std::abs(c2 - x)}, std::abs(a - c2)).determinant(), 0.0,
                1e-9 * std::max(1.0, std::pow(std::max(std::abs(a - x), std::abs(c2 - x)), 4)));
  }
}

TEST(Oja3Kernel, LineExampleAndCoincidence) {
  const Matrix3 dpair{{{0, 2, 4}, {2, 0, 2}, {4, 2, 0}}};
  EXPECT_NEAR(oja3_kernel({1, 1, 3}, dpair), 6.0, 1e-12);
  EXPECT_EQ(oja3_kernel({0, 2, 4}, dpair), 0.0);
}

TEST(Oja3Kernel, LineEqualsTwiceProduct) {
  auto g = ts::rng(3);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 200; ++rep) {
    const double x = z(g), a = z(g), b = z(g), c = z(g);
    const Matrix3 dp{{{0, std::abs(a - b), std::abs(a - c)},
                      {std::abs(a - b), 0, std::abs(b - c)},
                      {std::abs(a - c), std::abs(b - c), 0}}};
    const double expect = 2 * std::abs(a - x) * std::abs(b - x) * std::abs(c - x);
    EXPECT_NEAR(oja3_kernel({std::abs(a - x), std::abs(b - x), std::abs(c - x)}, dp), expect, 1e-10);
  }
}

TEST(Oja3Kernel, UnitCircleEqualityCase) {
  const double pi = std::numbers::pi;
  // x0 at 0 deg; sample x1, x2, x3 at 90, 270, 180 deg.
  const std::array<double, 3> dx{pi / 2, pi / 2, pi};
  const Matrix3 dp{{{0, pi, pi / 2}, {pi, 0, pi / 2}, {pi / 2, pi / 2, 0}}};
  EXPECT_NEAR(oja3_radicand(dx, dp), 0.0, 1e-9 * std::pow(pi, 6));
  EXPECT_NEAR(oja3_kernel(dx, dp), 0.0, 1e-3);
}

TEST(Oja3Kernel, NonMetricInputRaises) {
  // d(x1,x2) far exceeds what the triangle inequality allows.
  const Matrix3 dp{{{0, 100, 1}, {100, 0, 1}, {1, 1, 0}}};
  EXPECT_THROW(oja3_kernel({1, 1, 1}, dp), MetricViolation);
}

TEST(DistanceMatrix, FromValuesValidatesAndSymmetrizes) {
  const DistanceMatrix dm = DistanceMatrix::from_values(2, {0, 1, 1 + 1e-12, 0});
  EXPECT_EQ(dm(0, 1), dm(1, 0));
  EXPECT_THROW(DistanceMatrix::from_values(2, {0, 1, 2, 0}), InvalidArgument);
  EXPECT_THROW(DistanceMatrix::from_values(2, {1e-6, 1, 1, 0}), InvalidArgument);
  EXPECT_THROW(DistanceMatrix::from_values(2, {0, -1, -1, 0}), InvalidArgument);
  EXPECT_THROW(DistanceMatrix::from_values(2, {0, 1, 1}), InvalidArgument);
}

TEST(DistanceMatrix, CsvRoundTrip) {
  auto g = ts::rng(4);
  const DistanceMatrix dm = ts::euclidean_dm(ts::gaussian_points(6, 2, g));
  std::stringstream ss;
  write_distance_matrix_csv(ss, dm);
  const DistanceMatrix back = read_distance_matrix_csv(ss);
  EXPECT_EQ(back.values(), dm.values());
}

TEST(DistanceMatrix, CsvRejectsRaggedAndAsymmetric) {
  std::istringstream ragged("0,1\n1\n");
  EXPECT_THROW(read_distance_matrix_csv(ragged), InvalidArgument);
  std::istringstream asym("0,1\n1.5,0\n");
  EXPECT_THROW(read_distance_matrix_csv(asym), InvalidArgument);
  std::istringstream junk("0,x\nx,0\n");
  EXPECT_THROW(read_distance_matrix_csv(junk), InvalidArgument);
}

TEST(DistanceMatrix, SelectAndScale) {
  const DistanceMatrix dm = ts::line_dm({0, 1, 3});
  const std::vector<std::size_t> idx{2, 0};
  const DistanceMatrix sub = dm.select(idx);
  EXPECT_EQ(sub.size(), 2u);
  EXPECT_EQ(sub(0, 1), 3.0);
  EXPECT_EQ(dm.scaled(2.0)(1, 2), 4.0);
  EXPECT_EQ(dm.scale(), 3.0);
}

TEST(MetricAxioms, CleanAndBreached) {
  auto g = ts::rng(5);
  DistanceMatrix dm = ts::euclidean_dm(ts::gaussian_points(12, 3, g));
  EXPECT_EQ(check_metric_axioms(dm).violations, 0u);
  dm.set(0, 1, 10 * (dm(0, 2) + dm(2, 1)));
  const MetricAxiomReport r = check_metric_axioms(dm);
  EXPECT_GE(r.violations, 1u);
  EXPECT_GT(r.worst_excess, 0.0);
}

TEST(MetricAxioms, ArcLengthIsMetric) {
  auto g = ts::rng(6);
  std::vector<Object> objs;
  for (int i = 0; i < 50; ++i) objs.emplace_back(UnitVector(ts::random_unit(4, g)));
  const DistanceMatrix dm = distance_matrix(ObjectSet(objs), Metric::Sphere);
  EXPECT_EQ(check_metric_axioms(dm).violations, 0u);
}

TEST(QueryDistancesTest, RejectsNegative) {
  EXPECT_THROW(QueryDistances({1.0, -0.5}), InvalidArgument);
  const DistanceMatrix dm = ts::line_dm({0, 2});
  EXPECT_EQ(QueryDistances::from_row(dm, 1).to_sample, (std::vector<double>{2, 0}));
}
