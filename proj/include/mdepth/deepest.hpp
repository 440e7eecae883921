#pragma once

// Deepest-object estimation: in-sample argmax and the out-of-sample pipeline
// (Cholesky chart -> PCA -> box-constrained optimizer over each of the top
// in-sample starts).

#include "mdepth/depths.hpp"
#include "mdepth/metric_spaces.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace mdepth {

struct InSampleDeepest {
  std::size_t index = 0;
  double depth = 0.0;
};

/// Smallest index attaining the maximal sample depth.
InSampleDeepest deepest_in_sample(const DistanceMatrix& dm, DepthMethod method);

/// Indices sorted by decreasing depth, ties by increasing index.
std::vector<std::size_t> rank_by_depth(const std::vector<double>& depths);

// --- Cholesky chart for correlation matrices ---------------------------------

/// Row-major lower-triangular entries of the Cholesky factor:
/// (L11, L21, L22, L31, L32, L33, ...), length p(p+1)/2.
Eigen::VectorXd cholesky_encode(const CorrelationMatrix& x);

/// Rebuilds L, forms S = L L^T and rescales it to unit diagonal. Throws
/// InvalidArgument if the length is not triangular and DegenerateDecode if a
/// diagonal entry of S is <= 1e-12 or the result is not positive definite.
CorrelationMatrix cholesky_decode(const Eigen::VectorXd& v);

/// Matrix dimension p for a vector of length p(p+1)/2.
std::size_t triangular_dimension(std::size_t q);

/// Encode/decode pair between a metric space and R^q.
class CoordinateChart {
 public:
  virtual ~CoordinateChart() = default;
  virtual std::size_t coordinate_dim() const = 0;
  virtual Eigen::VectorXd encode(const Object& x) const = 0;
  virtual Object decode(const Eigen::VectorXd& v) const = 0;
};

class CholeskyChart final : public CoordinateChart {
 public:
  explicit CholeskyChart(std::size_t p) : p_(p) {}
  std::size_t coordinate_dim() const override { return p_ * (p_ + 1) / 2; }
  Eigen::VectorXd encode(const Object& x) const override;
  Object decode(const Eigen::VectorXd& v) const override;

 private:
  std::size_t p_;
};

// --- PCA ---------------------------------------------------------------------

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  // r x q, orthonormal rows
  Eigen::VectorXd explained;   // r variance ratios, non-increasing
  std::size_t r = 0;
  double tsh = 0.9;

  Eigen::VectorXd encode(const Eigen::VectorXd& v) const;
  Eigen::VectorXd decode(const Eigen::VectorXd& w) const;
};

/// PCA of the rows of `data` (n x q) using the covariance with divisor n - 1.
/// Keeps r = max(2, smallest k whose cumulative explained ratio >= tsh)
/// components, capped at min(n, q). Each component's first nonzero coordinate
/// is made positive.
PcaModel pca_fit(const Eigen::MatrixXd& data, double tsh);

// --- Box-constrained maximization --------------------------------------------

enum class OptimizerKind { SimplexBox, QuasiNewtonBox };

std::string_view to_string(OptimizerKind kind);
/// "simplex" or "lbfgs".
OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerConfig {
  OptimizerKind algorithm = OptimizerKind::SimplexBox;
  double half_width = 0.05;
  std::size_t max_evaluations = 0;  // 0 means 500 * dimension
  double function_tolerance = 1e-8;
  double fd_step = 1e-6;  // relative central-difference step (quasi-Newton only)
  std::size_t memory = 6;  // quasi-Newton correction pairs
  std::size_t starts = 5;
};

struct OptimizeResult {
  Eigen::VectorXd argmax;
  double value = 0.0;
  std::size_t evaluations = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Maximizes `objective` over the box [lower, upper]. Never returns a point
/// outside the box or a value below objective(start).
OptimizeResult optimize_box(const Objective& objective, const Eigen::VectorXd& start,
                            const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                            const OptimizerConfig& cfg);

// --- Out-of-sample pipeline ----------------------------------------------------

struct DeepestResult {
  CorrelationMatrix object;
  double depth = 0.0;
  /// Sample index of the start whose run produced the result.
  std::size_t start_index = 0;
  /// Largest depth among the PCA-reconstructed starts, before optimization.
  double start_depth = 0.0;
  std::size_t evaluations = 0;
  std::size_t pca_dimension = 0;
};

/// Out-of-sample deepest correlation matrix. `dm` may carry the precomputed
/// sample distance matrix.
DeepestResult deepest_out_of_sample(const std::vector<CorrelationMatrix>& sample, DepthMethod method,
                                    double tsh, const OptimizerConfig& cfg,
                                    const DistanceMatrix* dm = nullptr);

}  // namespace mdepth
