#pragma once

// Sample depth functions on distance data.
//
// Every per-query depth takes the query's distances to the sample and the
// sample's own distance matrix. Depths of sample members (depth_all_sample)
// include the member itself in the sample, so kernels that involve the
// query's own index are evaluated like any other.

#include "mdepth/metric_core.hpp"
#include "mdepth/metric_spaces.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mdepth {

enum class DepthMethod { MOD3, MOD2, MLD, MSD, MHD };

inline constexpr DepthMethod kAllMethods[] = {DepthMethod::MOD3, DepthMethod::MOD2,
                                              DepthMethod::MLD, DepthMethod::MSD,
                                              DepthMethod::MHD};

std::string_view to_string(DepthMethod method);
/// Throws InvalidArgument for anything other than MOD3|MOD2|MLD|MSD|MHD.
DepthMethod parse_method(std::string_view name);
/// Comma-separated list of method names.
std::vector<DepthMethod> parse_methods(std::string_view list);

/// Smallest sample the method is defined for (3 for MOD3, 1 for MHD, else 2).
std::size_t minimum_sample_size(DepthMethod method);

/// Upper end of the method's range: 2 for MSD, 1 otherwise. The lower end is 0.
double depth_upper_bound(DepthMethod method);

struct DepthReport {
  DepthMethod method = DepthMethod::MOD3;
  std::vector<double> values;
  double elapsed_seconds = 0.0;
};

/// Metric Oja depth: 1 / (1 + mean Oja kernel over all unordered sample triples).
double mod3_depth(const QueryDistances& q, const DistanceMatrix& dm);

/// mod3_depth with the mean taken over `triples` distinct triples drawn
/// uniformly without replacement. Deterministic in `seed`; requesting all
/// C(n,3) triples gives mod3_depth exactly.
double mod3_depth_subsampled(const QueryDistances& q, const DistanceMatrix& dm,
                             std::uint64_t triples, std::uint64_t seed);

/// 1 / (1 + mean sqrt(det B2) over unordered pairs). Not a proper depth: it
/// is identically 1 on the real line.
double mod2_depth(const QueryDistances& q, const DistanceMatrix& dm);

/// Lens depth: fraction of pairs i < j with dm(i, j) > max(q_i, q_j).
double mld_depth(const QueryDistances& q, const DistanceMatrix& dm);

/// Spatial depth in [0, 2]; pairs with a zero query distance contribute 0.
double msd_depth(const QueryDistances& q, const DistanceMatrix& dm);

/// Half-space depth approximated over anchor pairs:
///   min over anchors a1 != a2 with d(a1, x) <= d(a2, x) of
///   (1/n) #{i : d(X_i, a1) <= d(X_i, a2)},
/// or 1 when no such pair exists. `anchor_columns` is n x A row-major with
/// entry (i, a) = d(X_i, anchor a); `anchors_q` holds d(x, anchor a).
double mhd_depth(std::span<const double> anchors_q, std::span<const double> anchor_columns,
                 std::size_t n);

/// mhd_depth with the full sample as anchors.
double mhd_depth(const QueryDistances& q, const DistanceMatrix& dm);

/// mhd_depth with the sample members `anchors` as anchors.
double mhd_depth(const QueryDistances& q, const DistanceMatrix& dm,
                 std::span<const std::size_t> anchors);

/// Per-query depth against a fixed sample, with the sample-only work
/// (squared distances, half-space counts) done once at construction.
class DepthEvaluator {
 public:
  /// Throws InsufficientSample if dm is too small for `method`.
  DepthEvaluator(const DistanceMatrix& dm, DepthMethod method);

  DepthMethod method() const { return method_; }
  std::size_t sample_size() const { return dm_.size(); }

  double operator()(const QueryDistances& q) const;
  double operator()(std::span<const double> q) const;

 private:
  DistanceMatrix dm_;
  DepthMethod method_;
  std::vector<double> d2_;
  std::vector<std::size_t> halfspace_counts_;
};

/// Per-query dispatch on `method`.
double depth(DepthMethod method, const QueryDistances& q, const DistanceMatrix& dm);

/// Depth of every sample member with respect to the whole sample. Identical
/// to calling depth() with each row of dm. Half-space probabilities are
/// precomputed once so MHD stays O(n^3); MOD3 is O(n^4).
DepthReport depth_all_sample(const DistanceMatrix& dm, DepthMethod method);

/// Classical Oja depth in R^p: 1 / (1 + mean |det[X_1 - x | ... | X_p - x]|)
/// over all p-subsets of the sample (no 1/p! simplex factor).
double euclidean_oja_depth(const std::vector<EuclideanPoint>& points, const EuclideanPoint& x);

}  // namespace mdepth
