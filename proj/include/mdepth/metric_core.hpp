#pragma once

// Distance-matrix container and the Gram-type kernels every depth is built on.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace mdepth {

/// Symmetric, nonnegative, zero-diagonal matrix of pairwise object distances.
/// Stored row-major; rows are contiguous so kernels can stream over them.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  /// n x n zero matrix.
  explicit DistanceMatrix(std::size_t n);

  /// Validates and symmetrizes raw values: asymmetry above 1e-9 (relative to
  /// max(1, largest entry)), a diagonal above 1e-12, or a negative/non-finite
  /// entry is an InvalidArgument. Small asymmetries are averaged away.
  static DistanceMatrix from_values(std::size_t n, std::vector<double> values);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_, n_};
  }
  const std::vector<double>& values() const { return values_; }

  /// Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double d);

  /// Largest entry.
  double scale() const;

  /// Entrywise squares, same layout.
  std::vector<double> squared() const;

  /// Sub-matrix on the given indices, in the given order.
  DistanceMatrix select(std::span<const std::size_t> indices) const;

  /// Simultaneous row/column permutation: result(i, j) = (*this)(perm[i], perm[j]).
  DistanceMatrix permuted(std::span<const std::size_t> perm) const { return select(perm); }

  /// Multiplies every entry by c > 0.
  DistanceMatrix scaled(double c) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Distances d(x, X_i) from one query object to every sample object.
struct QueryDistances {
  std::vector<double> to_sample;

  QueryDistances() = default;
  /// Rejects negative or non-finite entries.
  explicit QueryDistances(std::vector<double> d);
  /// Row i of dm: the query is sample member i.
  static QueryDistances from_row(const DistanceMatrix& dm, std::size_t i);

  std::size_t size() const { return to_sample.size(); }
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct BMatrix3 {
  Matrix3 entries{};
  double determinant() const;
};

struct BMatrix2 {
  std::array<std::array<double, 2>, 2> entries{};
  double determinant() const {
    return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
  }
};

/// Betweenness event: d13 == d12 + d23 within tol * max(1, d13).
bool is_between(double d13, double d12, double d23, double tol);

/// entries[k][l] = (dx[k]^2 + dx[l]^2 - dpair[k][l]^2) / 2.
BMatrix3 b3_matrix(const std::array<double, 3>& dx, const Matrix3& dpair);

/// Top-left 2x2 block of b3_matrix for two sample objects.
BMatrix2 b2_matrix(const std::array<double, 2>& dx, double d12);

/// Absolute tolerance for a negative radicand built from squared distances
/// whose largest value is `max_sq`: 1e-9 * max(1, max_sq^3).
inline double radicand_tolerance(double max_sq) {
  const double cube = max_sq * max_sq * max_sq;
  return 1e-9 * (cube > 1.0 ? cube : 1.0);
}

/// The metric Oja kernel sqrt(det B3 + 4 prod dx^2). Throws MetricViolation
/// when the radicand is more negative than radicand_tolerance allows.
double oja3_kernel(const std::array<double, 3>& dx, const Matrix3& dpair);

/// det B3 + 4 prod dx^2 before clamping.
double oja3_radicand(const std::array<double, 3>& dx, const Matrix3& dpair);

struct TriangleTriple {
  std::size_t i = 0, j = 0, k = 0;
};

struct MetricAxiomReport {
  std::size_t triples_checked = 0;
  std::size_t violations = 0;
  /// max over checked triples of d(i,j) - d(i,k) - d(k,j); <= 0 when clean.
  double worst_excess = 0.0;
  TriangleTriple worst{};
};

/// Triangle-inequality audit with tolerance 1e-9 * max(1, dm.scale()).
/// Exhaustive up to n = 200, a fixed-seed sample of triples above that.
MetricAxiomReport check_metric_axioms(const DistanceMatrix& dm);

/// n rows of n comma-separated values, no header.
DistanceMatrix read_distance_matrix_csv(std::istream& in);
void write_distance_matrix_csv(std::ostream& out, const DistanceMatrix& dm);

}  // namespace mdepth
