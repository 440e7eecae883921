#pragma once

// Concrete metric spaces: the object types, their distances, and
// distance-matrix construction.

#include "mdepth/metric_core.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mdepth {

/// p x p symmetric positive definite matrix with unit diagonal.
class CorrelationMatrix {
 public:
  /// Validates symmetry and unit diagonal (1e-10) and positive definiteness
  /// (smallest eigenvalue > 1e-12).
  explicit CorrelationMatrix(Eigen::MatrixXd entries);

  static CorrelationMatrix identity(std::size_t p);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

/// Point on the unit sphere in R^p.
class UnitVector {
 public:
  /// Requires | |coords| - 1 | <= 1e-10.
  explicit UnitVector(Eigen::VectorXd coords);
  /// Rescales to unit norm if the norm is within `tol` of 1, else InvalidArgument.
  static UnitVector normalized(Eigen::VectorXd coords, double tol = 1e-6);

  std::size_t dim() const { return static_cast<std::size_t>(coords_.size()); }
  const Eigen::VectorXd& coords() const { return coords_; }

 private:
  Eigen::VectorXd coords_;
};

/// Piecewise-uniform distribution: masses[k] spread evenly over [edges[k], edges[k+1]).
class Histogram {
 public:
  /// Edges strictly increasing, masses nonnegative and summing to 1 within 1e-10.
  Histogram(std::vector<double> edges, std::vector<double> masses);
  /// As above but rescales masses with a positive total first.
  static Histogram normalized(std::vector<double> edges, std::vector<double> masses);

  std::size_t bins() const { return masses_.size(); }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& masses() const { return masses_; }

  /// Same masses, edges moved by c.
  Histogram shifted(double c) const;

 private:
  std::vector<double> edges_;
  std::vector<double> masses_;
};

class EuclideanPoint {
 public:
  explicit EuclideanPoint(Eigen::VectorXd coords);
  std::size_t dim() const { return static_cast<std::size_t>(coords_.size()); }
  const Eigen::VectorXd& coords() const { return coords_; }

 private:
  Eigen::VectorXd coords_;
};

enum class ObjectKind { Correlation, Sphere, Histogram, Euclidean };

/// Metric selector; each metric applies to exactly one object kind.
enum class Metric { Spd, Sphere, Wasserstein, Euclidean };

std::string_view to_string(ObjectKind kind);
std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);
ObjectKind kind_for(Metric metric);

using Object = std::variant<CorrelationMatrix, UnitVector, Histogram, EuclideanPoint>;

ObjectKind kind_of(const Object& obj);

/// Homogeneous collection of objects; mixed kinds or dimensions are rejected.
class ObjectSet {
 public:
  ObjectSet() = default;
  explicit ObjectSet(std::vector<Object> objects);

  std::size_t size() const { return objects_.size(); }
  bool empty() const { return objects_.empty(); }
  std::optional<ObjectKind> kind() const { return kind_; }
  const Object& operator[](std::size_t i) const { return objects_[i]; }
  const std::vector<Object>& objects() const { return objects_; }

  ObjectSet subset(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<Object> objects_;
  std::optional<ObjectKind> kind_;
};

/// Objects with one label per object ("" when unlabeled).
struct Dataset {
  ObjectSet objects;
  std::vector<std::string> labels;
};

/// Affine-invariant distance ||Log(a^{-1/2} b a^{-1/2})||_F between positive
/// definite matrices. Eigenvalues <= 1e-12 raise NotPositiveDefinite.
double spd_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double spd_distance(const CorrelationMatrix& a, const CorrelationMatrix& b);

/// a^{-1/2} of a symmetrized positive definite matrix.
Eigen::MatrixXd spd_inverse_sqrt(const Eigen::MatrixXd& a);
/// spd_distance given a precomputed a^{-1/2}.
double spd_distance_from_inverse_sqrt(const Eigen::MatrixXd& a_inv_sqrt, const Eigen::MatrixXd& b);

/// Arc length in [0, pi].
double sphere_distance(const UnitVector& u, const UnitVector& v);

/// L2-Wasserstein distance between piecewise-uniform histograms, exact.
double wasserstein2_distance(const Histogram& h1, const Histogram& h2);

double euclidean_distance(const EuclideanPoint& a, const EuclideanPoint& b);

/// Distance between two objects of the kind `metric` applies to.
double distance(const Object& a, const Object& b, Metric metric);

/// All pairwise distances; each unordered pair is evaluated once. Parallel
/// over rows, bit-identical to sequential evaluation.
DistanceMatrix distance_matrix(const ObjectSet& objects, Metric metric);

/// Distances from one object to every member of `sample`.
QueryDistances query_distances(const Object& x, const ObjectSet& sample, Metric metric);

/// Number of distance_matrix() calls so far in this process (diagnostics).
std::size_t distance_matrix_builds();

}  // namespace mdepth
