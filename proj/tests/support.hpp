#pragma once

// Shared generators and brute-force oracles. Oracles follow the definitions
// directly (explicit B matrices, ordered anchor loops, quadrature) and share
// no code with the library's kernels.

#include "mdepth/metric_core.hpp"
#include "mdepth/metric_spaces.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testing_support {

using mdepth::DistanceMatrix;
using mdepth::QueryDistances;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed * 0x9E3779B97F4A7C15ULL + 1); }

inline std::vector<Eigen::VectorXd> gaussian_points(std::size_t n, std::size_t p, std::mt19937_64& g,
                                                    double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  std::vector<Eigen::VectorXd> pts(n, Eigen::VectorXd(static_cast<Eigen::Index>(p)));
  for (auto& v : pts)
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = z(g);
  return pts;
}

inline DistanceMatrix euclidean_dm(const std::vector<Eigen::VectorXd>& pts) {
  DistanceMatrix dm(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) dm.set(i, j, (pts[i] - pts[j]).norm());
  return dm;
}

inline QueryDistances euclidean_q(const std::vector<Eigen::VectorXd>& pts, const Eigen::VectorXd& x) {
  std::vector<double> d;
  for (const auto& p : pts) d.push_back((p - x).norm());
  return QueryDistances(std::move(d));
}

inline DistanceMatrix line_dm(const std::vector<double>& xs) {
  DistanceMatrix dm(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) dm.set(i, j, std::abs(xs[i] - xs[j]));
  return dm;
}

inline QueryDistances line_q(const std::vector<double>& xs, double x) {
  std::vector<double> d;
  for (double v : xs) d.push_back(std::abs(v - x));
  return QueryDistances(std::move(d));
}

inline Eigen::MatrixXd random_correlation(std::size_t p, std::mt19937_64& g) {
  std::normal_distribution<double> z;
  const auto d = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd a(d, d + 2);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = z(g);
  Eigen::MatrixXd s = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd inv = s.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd c = inv.asDiagonal() * s * inv.asDiagonal();
  c = 0.5 * (c + c.transpose()).eval();
  c.diagonal().setOnes();
  return c;
}

inline Eigen::VectorXd random_unit(std::size_t p, std::mt19937_64& g) {
  std::normal_distribution<double> z;
  Eigen::VectorXd v(static_cast<Eigen::Index>(p));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = z(g);
  return v.normalized();
}

inline mdepth::Histogram random_histogram(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> bins(1, 6);
  const int m = bins(g);
  std::vector<double> edges{u(g) * 4.0 - 2.0};
  std::vector<double> masses;
  for (int k = 0; k < m; ++k) {
    edges.push_back(edges.back() + 0.05 + u(g));
    masses.push_back(u(g) + (k == 0 ? 0.1 : 0.0));
  }
  return mdepth::Histogram::normalized(edges, masses);
}

// --- depth oracles ------------------------------------------------------------

inline double b3_det_oracle(double a0, double a1, double a2, double d01, double d02, double d12) {
  Eigen::Matrix3d b;
  const double q[3] = {a0, a1, a2};
  const double d[3][3] = {{0, d01, d02}, {d01, 0, d12}, {d02, d12, 0}};
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) b(k, l) = 0.5 * (q[k] * q[k] + q[l] * q[l] - d[k][l] * d[k][l]);
  return b.determinant();
}

inline double mod3_oracle(const QueryDistances& q, const DistanceMatrix& dm) {
  const auto& x = q.to_sample;
  const std::size_t n = dm.size();
  long double sum = 0.0L;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double r = b3_det_oracle(x[i], x[j], x[k], dm(i, j), dm(i, k), dm(j, k)) +
                         4.0 * x[i] * x[i] * x[j] * x[j] * x[k] * x[k];
        sum += std::sqrt(std::max(0.0, r));
        ++count;
      }
  return 1.0 / (1.0 + static_cast<double>(sum / static_cast<long double>(count)));
}

inline double mod2_oracle(const QueryDistances& q, const DistanceMatrix& dm) {
  const auto& x = q.to_sample;
  const std::size_t n = dm.size();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Eigen::Matrix2d b;
      b << x[i] * x[i], 0.5 * (x[i] * x[i] + x[j] * x[j] - dm(i, j) * dm(i, j)),
          0.5 * (x[i] * x[i] + x[j] * x[j] - dm(i, j) * dm(i, j)), x[j] * x[j];
      sum += std::sqrt(std::max(0.0, b.determinant()));
      ++count;
    }
  return 1.0 / (1.0 + sum / static_cast<double>(count));
}

inline double mld_oracle(const QueryDistances& q, const DistanceMatrix& dm) {
  const auto& x = q.to_sample;
  const std::size_t n = dm.size();
  std::size_t hits = 0, count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++count)
      if (dm(i, j) > std::max(x[i], x[j])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(count);
}

inline double msd_oracle(const QueryDistances& q, const DistanceMatrix& dm) {
  const auto& x = q.to_sample;
  const std::size_t n = dm.size();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++count)
      if (x[i] != 0.0 && x[j] != 0.0)
        sum += (x[i] * x[i] + x[j] * x[j] - dm(i, j) * dm(i, j)) / (x[i] * x[j]);
  return 1.0 - 0.5 * sum / static_cast<double>(count);
}

inline double mhd_oracle(const QueryDistances& q, const DistanceMatrix& dm) {
  const auto& x = q.to_sample;
  const std::size_t n = dm.size();
  double best = 1.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b || !(x[a] <= x[b])) continue;
      std::size_t c = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (dm(i, a) <= dm(i, b)) ++c;
      best = std::min(best, static_cast<double>(c) / static_cast<double>(n));
    }
  return best;
}

// W2 between piecewise-uniform histograms by midpoint quadrature of the
// quantile difference.
inline double quantile(const mdepth::Histogram& h, double t) {
  const auto& e = h.edges();
  const auto& m = h.masses();
  double cum = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] > 0.0 && (t <= cum + m[k] || k + 1 == m.size())) {
      return e[k] + (e[k + 1] - e[k]) * std::clamp((t - cum) / m[k], 0.0, 1.0);
    }
    cum += m[k];
  }
  return e.back();
}

inline double w2_quadrature(const mdepth::Histogram& a, const mdepth::Histogram& b, int steps = 200000) {
  double s = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double t = (k + 0.5) / steps;
    const double d = quantile(a, t) - quantile(b, t);
    s += d * d;
  }
  return std::sqrt(s / steps);
}

// Affine-invariant distance from the generalized eigenvalues of (B, A).
inline double spd_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(b, a);
  double s = 0.0;
  for (Eigen::Index k = 0; k < ges.eigenvalues().size(); ++k) {
    const double l = std::log(ges.eigenvalues()(k));
    s += l * l;
  }
  return std::sqrt(s);
}

}  // namespace testing_support
