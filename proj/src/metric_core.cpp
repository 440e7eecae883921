#include "mdepth/metric_core.hpp"

#include "mdepth/errors.hpp"
#include "mdepth/format.hpp"
#include "mdepth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace mdepth {

DistanceMatrix::DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

DistanceMatrix DistanceMatrix::from_values(std::size_t n, std::vector<double> values) {
  if (values.size() != n * n) {
    throw InvalidArgument("distance matrix needs " + std::to_string(n * n) + " values, got " +
                          std::to_string(values.size()));
  }
  double scale = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("distance matrix has a non-finite entry");
    if (v < 0.0) throw InvalidArgument("distance matrix has a negative entry");
    scale = std::max(scale, v);
  }
  const double sym_tol = 1e-9 * std::max(1.0, scale);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(values[i * n + i]) > 1e-12) {
      throw InvalidArgument("distance matrix diagonal entry " + std::to_string(i) + " is not zero");
    }
    values[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = values[i * n + j];
      const double b = values[j * n + i];
      if (std::abs(a - b) > sym_tol) {
        throw InvalidArgument("distance matrix is not symmetric at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
      const double avg = 0.5 * (a + b);
      values[i * n + j] = avg;
      values[j * n + i] = avg;
    }
  }
  DistanceMatrix dm;
  dm.n_ = n;
  dm.values_ = std::move(values);
  return dm;
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double d) {
  values_[i * n_ + j] = d;
  values_[j * n_ + i] = d;
}

double DistanceMatrix::scale() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, v);
  return s;
}

std::vector<double> DistanceMatrix::squared() const {
  std::vector<double> sq(values_.size());
  std::transform(values_.begin(), values_.end(), sq.begin(), [](double v) { return v * v; });
  return sq;
}

DistanceMatrix DistanceMatrix::select(std::span<const std::size_t> indices) const {
  DistanceMatrix out(indices.size());
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] >= n_) throw InvalidArgument("distance matrix index out of range");
    for (std::size_t b = 0; b < indices.size(); ++b) {
      out.values_[a * out.n_ + b] = (*this)(indices[a], indices[b]);
    }
  }
  return out;
}

DistanceMatrix DistanceMatrix::scaled(double c) const {
  if (!(c > 0.0)) throw InvalidArgument("distance scale factor must be positive");
  DistanceMatrix out = *this;
  for (double& v : out.values_) v *= c;
  return out;
}

QueryDistances::QueryDistances(std::vector<double> d) : to_sample(std::move(d)) {
  for (double v : to_sample) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("query distances must be finite and nonnegative");
    }
  }
}

QueryDistances QueryDistances::from_row(const DistanceMatrix& dm, std::size_t i) {
  QueryDistances q;
  auto r = dm.row(i);
  q.to_sample.assign(r.begin(), r.end());
  return q;
}

double BMatrix3::determinant() const {
  const auto& b = entries;
  return b[0][0] * b[1][1] * b[2][2] + 2.0 * b[0][1] * b[1][2] * b[2][0] -
         b[0][0] * b[1][2] * b[1][2] - b[1][1] * b[2][0] * b[2][0] -
         b[2][2] * b[0][1] * b[0][1];
}

bool is_between(double d13, double d12, double d23, double tol) {
  if (d13 < 0.0 || d12 < 0.0 || d23 < 0.0 || tol < 0.0) {
    throw InvalidArgument("is_between: distances and tolerance must be nonnegative");
  }
  return std::abs(d13 - (d12 + d23)) <= tol * std::max(1.0, d13);
}

namespace {

void check_triple_inputs(const std::array<double, 3>& dx, const Matrix3& dpair) {
  for (double v : dx) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("query distances must be finite and nonnegative");
    }
  }
  for (int k = 0; k < 3; ++k) {
    if (dpair[k][k] != 0.0) throw InvalidArgument("pairwise distances need a zero diagonal");
    for (int l = 0; l < 3; ++l) {
      if (!(dpair[k][l] >= 0.0) || !std::isfinite(dpair[k][l])) {
        throw InvalidArgument("pairwise distances must be finite and nonnegative");
      }
      if (dpair[k][l] != dpair[l][k]) throw InvalidArgument("pairwise distances must be symmetric");
    }
  }
}

}  // namespace

BMatrix3 b3_matrix(const std::array<double, 3>& dx, const Matrix3& dpair) {
  check_triple_inputs(dx, dpair);
  BMatrix3 b;
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      b.entries[k][l] =
          k == l ? dx[k] * dx[k] : 0.5 * (dx[k] * dx[k] + dx[l] * dx[l] - dpair[k][l] * dpair[k][l]);
    }
  }
  return b;
}

BMatrix2 b2_matrix(const std::array<double, 2>& dx, double d12) {
  if (!(dx[0] >= 0.0) || !(dx[1] >= 0.0) || !(d12 >= 0.0)) {
    throw InvalidArgument("b2_matrix: distances must be nonnegative");
  }
  BMatrix2 b;
  b.entries[0][0] = dx[0] * dx[0];
  b.entries[1][1] = dx[1] * dx[1];
  b.entries[0][1] = b.entries[1][0] = 0.5 * (dx[0] * dx[0] + dx[1] * dx[1] - d12 * d12);
  return b;
}

double oja3_radicand(const std::array<double, 3>& dx, const Matrix3& dpair) {
  const BMatrix3 b = b3_matrix(dx, dpair);
  const double prod = b.entries[0][0] * b.entries[1][1] * b.entries[2][2];
  return b.determinant() + 4.0 * prod;
}

double oja3_kernel(const std::array<double, 3>& dx, const Matrix3& dpair) {
  const double rad = oja3_radicand(dx, dpair);
  double max_sq = 0.0;
  for (int k = 0; k < 3; ++k) {
    max_sq = std::max(max_sq, dx[k] * dx[k]);
    for (int l = 0; l < 3; ++l) max_sq = std::max(max_sq, dpair[k][l] * dpair[k][l]);
  }
  if (rad < 0.0) {
    if (rad < -radicand_tolerance(max_sq)) {
      throw MetricViolation("Oja kernel radicand " + format_double(rad) +
                            " is negative beyond tolerance; distances are not a metric");
    }
    return 0.0;
  }
  return std::sqrt(rad);
}

MetricAxiomReport check_metric_axioms(const DistanceMatrix& dm) {
  MetricAxiomReport rep;
  const std::size_t n = dm.size();
  if (n < 3) return rep;
  const double tol = 1e-9 * std::max(1.0, dm.scale());
  rep.worst_excess = -std::numeric_limits<double>::infinity();

  auto visit = [&](std::size_t i, std::size_t j, std::size_t k) {
    ++rep.triples_checked;
    const double excess = dm(i, j) - dm(i, k) - dm(k, j);
    if (excess > tol) ++rep.violations;
    if (excess > rep.worst_excess) {
      rep.worst_excess = excess;
      rep.worst = {i, j, k};
    }
  };

  if (n <= 200) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (k != i && k != j) visit(i, j, k);
  } else {
    Rng rng = make_rng(0x6d65747269637321ULL);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t samples = 2'000'000;
    for (std::size_t s = 0; s < samples; ++s) {
      const std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
      if (i == j || j == k || i == k) continue;
      visit(i, j, k);
    }
  }
  return rep;
}

DistanceMatrix read_distance_matrix_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t count = 0;
    while (std::getline(ss, field, ',')) {
      values.push_back(parse_double(field, "distance matrix CSV"));
      ++count;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw InvalidArgument("distance matrix CSV row " + std::to_string(rows) + " has " +
                            std::to_string(count) + " fields, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw InvalidArgument("distance matrix CSV is empty");
  if (rows != cols) {
    throw InvalidArgument("distance matrix CSV is " + std::to_string(rows) + "x" +
                          std::to_string(cols) + ", expected square");
  }
  return DistanceMatrix::from_values(rows, std::move(values));
}

void write_distance_matrix_csv(std::ostream& out, const DistanceMatrix& dm) {
  for (std::size_t i = 0; i < dm.size(); ++i) {
    for (std::size_t j = 0; j < dm.size(); ++j) {
      if (j) out << ',';
      out << format_double(dm(i, j));
    }
    out << '\n';
  }
}

}  // namespace mdepth
