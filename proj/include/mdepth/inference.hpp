#pragma once

// Two-group permutation test on the distance between the groups' deepest
// members, and the label-swap contamination experiment.

#include "mdepth/depths.hpp"
#include "mdepth/metric_spaces.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mdepth {

/// Group membership (0 or 1) for a dataset with exactly two distinct labels;
/// the lexicographically smaller label is group 0.
struct GroupSplit {
  std::array<std::string, 2> names;
  std::vector<int> group;
};

/// Throws InvalidArgument unless there are exactly two distinct labels.
GroupSplit split_groups(const std::vector<std::string>& labels);

/// Distance between the deepest in-sample members of the two groups, each
/// group's depth computed against its own members only.
double deepest_distance_statistic(const DistanceMatrix& dm, const std::vector<int>& group,
                                  DepthMethod method);
double deepest_distance_statistic(const Dataset& data, Metric metric, DepthMethod method);

struct PermutationReport {
  DepthMethod method = DepthMethod::MOD3;
  std::size_t B = 0;
  std::uint64_t seed = 0;
  std::array<std::string, 2> groups;
  std::array<std::size_t, 2> group_sizes{};
  double t_observed = 0.0;
  std::vector<double> t_permuted;
  /// #{b : t_observed <= t_permuted[b]} / B
  double p_value = 0.0;
  /// (1 + #{...}) / (1 + B)
  double p_value_corrected = 0.0;
};

/// Permutation b relabels with a size-preserving shuffle drawn from
/// child_seed(seed, b). Throws InvalidArgument for B = 0.
PermutationReport permutation_test(const DistanceMatrix& dm, const GroupSplit& split,
                                   DepthMethod method, std::size_t B, std::uint64_t seed);
/// Builds the distance matrix once, then as above.
PermutationReport permutation_test(const Dataset& data, Metric metric, DepthMethod method,
                                   std::size_t B, std::uint64_t seed);

struct SwapExperimentReport {
  std::size_t k = 0;
  std::size_t repeats = 0;
  std::size_t B = 0;
  std::uint64_t seed = 0;
  std::vector<DepthMethod> methods;
  /// p_values[m][r]: method m, repeat r.
  std::vector<std::vector<double>> p_values;
  std::vector<double> mean_p_values;
};

/// Each repeat exchanges the labels of k uniformly chosen members of each
/// group, then runs a permutation test per method.
SwapExperimentReport label_swap_experiment(const Dataset& data, Metric metric,
                                           const std::vector<DepthMethod>& methods, std::size_t k,
                                           std::size_t repeats, std::size_t B, std::uint64_t seed);

}  // namespace mdepth
