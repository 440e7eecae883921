#include "mdepth/inference.hpp"

#include "mdepth/deepest.hpp"
#include "mdepth/errors.hpp"
#include "mdepth/parallel.hpp"
#include "mdepth/rng.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace mdepth {

GroupSplit split_groups(const std::vector<std::string>& labels) {
  const std::set<std::string> distinct(labels.begin(), labels.end());
  if (distinct.size() != 2) {
    throw InvalidArgument("permutation test needs exactly two group labels, found " +
                          std::to_string(distinct.size()));
  }
  GroupSplit split{{*distinct.begin(), *distinct.rbegin()}, {}};
  split.group.reserve(labels.size());
  for (const auto& label : labels) split.group.push_back(label == split.names[0] ? 0 : 1);
  return split;
}

namespace {

std::array<std::vector<std::size_t>, 2> members(const std::vector<int>& group) {
  std::array<std::vector<std::size_t>, 2> out;
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (group[i] != 0 && group[i] != 1) throw InvalidArgument("group indicators must be 0 or 1");
    out[static_cast<std::size_t>(group[i])].push_back(i);
  }
  return out;
}

void shuffle(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(v[i - 1], v[pick(rng)]);
  }
}

}  // namespace

double deepest_distance_statistic(const DistanceMatrix& dm, const std::vector<int>& group,
                                  DepthMethod method) {
  if (group.size() != dm.size()) throw InvalidArgument("group vector does not match the sample");
  const auto idx = members(group);
  std::array<std::size_t, 2> deepest{};
  for (std::size_t g = 0; g < 2; ++g) {
    if (idx[g].size() < minimum_sample_size(method)) {
      throw InsufficientSample("group " + std::to_string(g) + " has " +
                               std::to_string(idx[g].size()) + " members; " +
                               std::string(to_string(method)) + " needs " +
                               std::to_string(minimum_sample_size(method)));
    }
    deepest[g] = idx[g][deepest_in_sample(dm.select(idx[g]), method).index];
  }
  return dm(deepest[0], deepest[1]);
}

double deepest_distance_statistic(const Dataset& data, Metric metric, DepthMethod method) {
  const GroupSplit split = split_groups(data.labels);
  return deepest_distance_statistic(distance_matrix(data.objects, metric), split.group, method);
}

PermutationReport permutation_test(const DistanceMatrix& dm, const GroupSplit& split,
                                   DepthMethod method, std::size_t B, std::uint64_t seed) {
  if (B == 0) throw InvalidArgument("B must be at least 1");
  PermutationReport report;
  report.method = method;
  report.B = B;
  report.seed = seed;
  report.groups = split.names;
  const auto idx = members(split.group);
  report.group_sizes = {idx[0].size(), idx[1].size()};
  report.t_observed = deepest_distance_statistic(dm, split.group, method);
  report.t_permuted.assign(B, 0.0);
  parallel_for(B, [&](std::size_t b) {
    std::vector<int> permuted = split.group;
    Rng rng = make_rng(child_seed(seed, b));
    shuffle(permuted, rng);
    report.t_permuted[b] = deepest_distance_statistic(dm, permuted, method);
  });
  const auto hits = static_cast<double>(
      std::count_if(report.t_permuted.begin(), report.t_permuted.end(),
                    [&](double t) { return report.t_observed <= t; }));
  report.p_value = hits / static_cast<double>(B);
  report.p_value_corrected = (1.0 + hits) / (1.0 + static_cast<double>(B));
  return report;
}

PermutationReport permutation_test(const Dataset& data, Metric metric, DepthMethod method,
                                   std::size_t B, std::uint64_t seed) {
  if (B == 0) throw InvalidArgument("B must be at least 1");
  const GroupSplit split = split_groups(data.labels);
  return permutation_test(distance_matrix(data.objects, metric), split, method, B, seed);
}

SwapExperimentReport label_swap_experiment(const Dataset& data, Metric metric,
                                           const std::vector<DepthMethod>& methods, std::size_t k,
                                           std::size_t repeats, std::size_t B, std::uint64_t seed) {
  if (methods.empty()) throw InvalidArgument("at least one method is required");
  if (repeats < 1) throw InvalidArgument("repeats must be at least 1");
  if (B == 0) throw InvalidArgument("B must be at least 1");
  const GroupSplit split = split_groups(data.labels);
  const auto idx = members(split.group);
  if (k > std::min(idx[0].size(), idx[1].size())) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the smaller group size " +
                          std::to_string(std::min(idx[0].size(), idx[1].size())));
  }
  const DistanceMatrix dm = distance_matrix(data.objects, metric);

  SwapExperimentReport report;
  report.k = k;
  report.repeats = repeats;
  report.B = B;
  report.seed = seed;
  report.methods = methods;
  report.p_values.assign(methods.size(), std::vector<double>(repeats, 0.0));

  for (std::size_t r = 0; r < repeats; ++r) {
    const std::uint64_t rep_seed = child_seed(seed, r);
    Rng rng = make_rng(rep_seed);
    GroupSplit swapped = split;
    for (std::size_t g = 0; g < 2; ++g) {
      std::vector<std::size_t> pool = idx[g];
      for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
        swapped.group[pool[i]] = 1 - static_cast<int>(g);
      }
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
      report.p_values[m][r] =
          permutation_test(dm, swapped, methods[m], B, child_seed(rep_seed, m + 1)).p_value;
    }
  }
  for (const auto& values : report.p_values) {
    report.mean_p_values.push_back(std::accumulate(values.begin(), values.end(), 0.0) /
                                   static_cast<double>(repeats));
  }
  return report;
}

}  // namespace mdepth
