#pragma once

// Synthetic samples with a known center and replicated location experiments.

#include "mdepth/deepest.hpp"
#include "mdepth/depths.hpp"
#include "mdepth/metric_spaces.hpp"
#include "mdepth/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdepth {

struct CorrSimConfig {
  std::size_t p = 3;
  std::size_t n = 60;
  double eps = 0.05;
  double nu_bulk = 0.0;
  double nu_out = 3.0;
  std::size_t reps = 50;
  std::uint64_t seed = 0;
};

struct SphereSimConfig {
  std::size_t p = 3;
  std::size_t n = 100;
  double eps = 0.10;
  double lambda_bulk = 5.0;
  double lambda_out = -1.0;
  std::size_t reps = 50;
  std::uint64_t seed = 0;
};

/// Throws InvalidArgument unless p >= 2, n >= 4, reps >= 1 and eps in [0, 1).
void validate(const CorrSimConfig& cfg);
/// As above, and lambda_bulk != 0.
void validate(const SphereSimConfig& cfg);

/// Haar-distributed p x p orthogonal matrix (QR of a Gaussian matrix with the
/// column signs fixed by diag(R)).
Eigen::MatrixXd random_orthogonal(std::size_t p, Rng& rng);

struct GeneratedSample {
  ObjectSet objects;
  Object center;
};

/// Random-rotation correlation matrices around the identity; each object is an
/// outlier (spectrum location nu_out instead of nu_bulk) with probability eps.
GeneratedSample gen_correlation_sample(const CorrSimConfig& cfg, Rng& rng);

/// Normalized N(lambda 1, I) draws; lambda = lambda_out with probability eps.
/// The center is sign(lambda_bulk) / sqrt(p) * 1.
GeneratedSample gen_sphere_sample(const SphereSimConfig& cfg, Rng& rng);

/// Two labeled histogram groups ("A" then "B") binned from `draws` N(0,1)
/// and N(shift,1) variates on a common equi-spaced grid covering both.
Dataset gen_histogram_groups(std::size_t n1, std::size_t n2, double shift, std::size_t bins,
                             std::uint64_t seed, std::size_t draws = 200);

enum class SimSpace { Correlation, Sphere };

struct OutOfSampleSettings {
  double tsh = 0.9;
  OptimizerConfig optimizer;
};

struct ExperimentSpec {
  SimSpace space = SimSpace::Correlation;
  CorrSimConfig corr;
  SphereSimConfig sphere;
  std::vector<DepthMethod> methods;
  /// When set, adds an out-of-sample column per method (correlation only).
  std::optional<OutOfSampleSettings> out_of_sample;
  /// Adds a column that picks a uniformly random sample member.
  bool baseline = false;
};

enum class Estimator { InSample, OutOfSample, RandomPick };

std::string_view to_string(Estimator estimator);

struct ExperimentColumn {
  Estimator estimator = Estimator::InSample;
  std::optional<DepthMethod> method;  // empty for the random pick
  std::vector<double> errors;         // per replicate
  std::vector<double> seconds;        // per replicate, excluding distance computation
  /// Out-of-sample only: returned depth and best reconstructed start depth.
  std::vector<double> depths;
  std::vector<double> start_depths;
  double mean_error = 0.0;
  double sd_error = 0.0;  // sample standard deviation, 0 for one replicate
  double mean_seconds = 0.0;

  std::string name() const;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<ExperimentColumn> columns;
};

std::size_t replicate_count(const ExperimentSpec& spec);
std::uint64_t experiment_seed(const ExperimentSpec& spec);

/// Replicate r draws its sample from child_seed(seed, r); replicates run in
/// parallel and the report does not depend on scheduling except for timings.
ExperimentReport run_location_experiment(const ExperimentSpec& spec);

}  // namespace mdepth
