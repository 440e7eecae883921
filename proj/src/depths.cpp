#include "mdepth/depths.hpp"

#include "mdepth/errors.hpp"
#include "mdepth/kernels.hpp"
#include "mdepth/parallel.hpp"
#include "mdepth/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace mdepth {

std::string_view to_string(DepthMethod method) {
  switch (method) {
    case DepthMethod::MOD3: return "MOD3";
    case DepthMethod::MOD2: return "MOD2";
    case DepthMethod::MLD: return "MLD";
    case DepthMethod::MSD: return "MSD";
    case DepthMethod::MHD: return "MHD";
  }
  return "unknown";
}

DepthMethod parse_method(std::string_view name) {
  for (DepthMethod m : kAllMethods) {
    if (name == to_string(m)) return m;
  }
  throw InvalidArgument("unknown depth method '" + std::string(name) +
                        "' (expected MOD3|MOD2|MLD|MSD|MHD)");
}

std::vector<DepthMethod> parse_methods(std::string_view list) {
  std::vector<DepthMethod> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, comma - start);
    if (!item.empty()) out.push_back(parse_method(item));
    start = comma + 1;
  }
  if (out.empty()) throw InvalidArgument("empty method list");
  return out;
}

std::size_t minimum_sample_size(DepthMethod method) {
  switch (method) {
    case DepthMethod::MOD3: return 3;
    case DepthMethod::MHD: return 1;
    default: return 2;
  }
}

double depth_upper_bound(DepthMethod method) { return method == DepthMethod::MSD ? 2.0 : 1.0; }

namespace {

void require_sample(DepthMethod method, std::size_t n) {
  if (n < minimum_sample_size(method)) {
    throw InsufficientSample(std::string(to_string(method)) + " needs at least " +
                             std::to_string(minimum_sample_size(method)) + " sample objects, got " +
                             std::to_string(n));
  }
}

void require_matching(const QueryDistances& q, const DistanceMatrix& dm) {
  if (q.size() != dm.size()) {
    throw InvalidArgument("query has " + std::to_string(q.size()) + " distances but the sample has " +
                          std::to_string(dm.size()) + " objects");
  }
}

double pairs(std::size_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

double triples(std::size_t n) {
  const double m = static_cast<double>(n);
  return m * (m - 1.0) * (m - 2.0) / 6.0;
}

std::vector<double> squares(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
  return out;
}

// Shared inner routines; `d2` is the squared distance matrix of the sample.

double mod3_from(std::span<const double> q, std::span<const double> d2, std::size_t n) {
  const auto& k = kernels::active();
  const std::vector<double> q2 = squares(q);
  double sum = 0.0;
  std::size_t violations = 0;
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const double* row_i = d2.data() + i * n;
    for (std::size_t j = i + 1; j + 1 < n; ++j) {
      const double* row_j = d2.data() + j * n;
      const std::size_t from = j + 1;
      const kernels::Oja3Sum part =
          k.oja3_row(q2[i], q2[j], row_i[j], q2.data() + from, row_i + from, row_j + from, n - from);
      sum += part.sum;
      violations += part.violations;
    }
  }
  if (violations > 0) {
    throw MetricViolation(std::to_string(violations) +
                          " Oja kernel radicands are negative beyond tolerance; "
                          "the distances do not come from a metric");
  }
  return 1.0 / (1.0 + sum / triples(n));
}

double mod2_from(std::span<const double> q, std::span<const double> d2, std::size_t n) {
  const auto& k = kernels::active();
  const std::vector<double> q2 = squares(q);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sum += k.oja2_row(q2[i], q2.data() + i + 1, d2.data() + i * n + i + 1, n - i - 1);
  }
  return 1.0 / (1.0 + sum / pairs(n));
}

double mld_from(std::span<const double> q, const DistanceMatrix& dm) {
  const auto& k = kernels::active();
  const std::size_t n = dm.size();
  std::size_t hits = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    hits += k.lens_row(q[i], q.data() + i + 1, dm.row(i).data() + i + 1, n - i - 1);
  }
  return static_cast<double>(hits) / pairs(n);
}

double msd_from(std::span<const double> q, std::span<const double> d2, std::size_t n) {
  const auto& k = kernels::active();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (q[i] == 0.0) continue;
    sum += k.spatial_row(q[i], q.data() + i + 1, d2.data() + i * n + i + 1, n - i - 1);
  }
  return 1.0 - 0.5 * sum / pairs(n);
}

// counts[a1 * A + a2] = #{i : rows[a1][i] <= rows[a2][i]} for anchor rows of length n.
std::vector<std::size_t> halfspace_counts(std::span<const double> anchor_rows, std::size_t anchors,
                                          std::size_t n) {
  const auto& k = kernels::active();
  std::vector<std::size_t> counts(anchors * anchors, 0);
  for (std::size_t a1 = 0; a1 < anchors; ++a1) {
    for (std::size_t a2 = 0; a2 < anchors; ++a2) {
      if (a1 == a2) continue;
      counts[a1 * anchors + a2] =
          k.less_equal_count(anchor_rows.data() + a1 * n, anchor_rows.data() + a2 * n, n);
    }
  }
  return counts;
}

double mhd_from_counts(std::span<const double> anchors_q, std::span<const std::size_t> counts,
                       std::size_t anchors, std::size_t n) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t a1 = 0; a1 < anchors; ++a1) {
    for (std::size_t a2 = 0; a2 < anchors; ++a2) {
      if (a1 == a2 || anchors_q[a1] > anchors_q[a2]) continue;
      best = std::min(best, counts[a1 * anchors + a2]);
    }
  }
  if (best == std::numeric_limits<std::size_t>::max()) return 1.0;
  return static_cast<double>(best) / static_cast<double>(n);
}

// Anchor rows (A x n) of a full-sample distance matrix are its rows.
std::vector<double> anchor_rows_from(const DistanceMatrix& dm, std::span<const std::size_t> anchors) {
  const std::size_t n = dm.size();
  std::vector<double> rows(anchors.size() * n);
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    if (anchors[a] >= n) throw InvalidArgument("anchor index out of range");
    auto r = dm.row(anchors[a]);
    std::copy(r.begin(), r.end(), rows.begin() + static_cast<std::ptrdiff_t>(a * n));
  }
  return rows;
}

// Combinatorial number system: rank r in [0, C(n,3)) -> i < j < k.
std::array<std::size_t, 3> unrank_triple(std::uint64_t r) {
  auto choose3 = [](std::uint64_t m) { return m < 3 ? 0 : m * (m - 1) * (m - 2) / 6; };
  auto choose2 = [](std::uint64_t m) { return m < 2 ? 0 : m * (m - 1) / 2; };
  std::uint64_t k = 2;
  while (choose3(k + 1) <= r) ++k;
  r -= choose3(k);
  std::uint64_t j = 1;
  while (choose2(j + 1) <= r) ++j;
  r -= choose2(j);
  return {static_cast<std::size_t>(r), static_cast<std::size_t>(j), static_cast<std::size_t>(k)};
}

}  // namespace

DepthEvaluator::DepthEvaluator(const DistanceMatrix& dm, DepthMethod method)
    : dm_(dm), method_(method) {
  require_sample(method, dm.size());
  switch (method) {
    case DepthMethod::MOD3:
    case DepthMethod::MOD2:
    case DepthMethod::MSD:
      d2_ = dm_.squared();
      break;
    case DepthMethod::MHD:
      halfspace_counts_ = halfspace_counts(dm_.values(), dm_.size(), dm_.size());
      break;
    case DepthMethod::MLD:
      break;
  }
}

double DepthEvaluator::operator()(const QueryDistances& q) const {
  require_matching(q, dm_);
  return (*this)(std::span<const double>(q.to_sample));
}

double DepthEvaluator::operator()(std::span<const double> q) const {
  const std::size_t n = dm_.size();
  if (q.size() != n) throw InvalidArgument("query length does not match the sample");
  switch (method_) {
    case DepthMethod::MOD3: return mod3_from(q, d2_, n);
    case DepthMethod::MOD2: return mod2_from(q, d2_, n);
    case DepthMethod::MLD: return mld_from(q, dm_);
    case DepthMethod::MSD: return msd_from(q, d2_, n);
    case DepthMethod::MHD: return mhd_from_counts(q, halfspace_counts_, n, n);
  }
  throw InvalidArgument("unknown depth method");
}

double mod3_depth(const QueryDistances& q, const DistanceMatrix& dm) {
  return DepthEvaluator(dm, DepthMethod::MOD3)(q);
}

double mod3_depth_subsampled(const QueryDistances& q, const DistanceMatrix& dm,
                             std::uint64_t triple_count, std::uint64_t seed) {
  require_matching(q, dm);
  require_sample(DepthMethod::MOD3, dm.size());
  const std::uint64_t n = dm.size();
  const std::uint64_t total = n * (n - 1) * (n - 2) / 6;
  if (triple_count == 0 || triple_count > total) {
    throw InvalidArgument("subsampled MOD3 needs between 1 and " + std::to_string(total) +
                          " triples, got " + std::to_string(triple_count));
  }
  if (triple_count == total) return mod3_depth(q, dm);

  // Floyd's algorithm: triple_count distinct ranks, uniformly.
  Rng rng = make_rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(triple_count * 2);
  for (std::uint64_t top = total - triple_count; top < total; ++top) {
    const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, top)(rng);
    if (!chosen.insert(t).second) chosen.insert(top);
  }
  std::vector<std::uint64_t> ranks(chosen.begin(), chosen.end());
  std::sort(ranks.begin(), ranks.end());

  const auto& qd = q.to_sample;
  double sum = 0.0;
  std::size_t violations = 0;
  for (std::uint64_t r : ranks) {
    const auto [i, j, k] = unrank_triple(r);
    const double qk2 = qd[k] * qd[k];
    const double dik2 = dm(i, k) * dm(i, k);
    const double djk2 = dm(j, k) * dm(j, k);
    const auto part = kernels::scalar::oja3_row(qd[i] * qd[i], qd[j] * qd[j], dm(i, j) * dm(i, j),
                                                &qk2, &dik2, &djk2, 1);
    sum += part.sum;
    violations += part.violations;
  }
  if (violations > 0) {
    throw MetricViolation("Oja kernel radicand negative beyond tolerance; not a metric");
  }
  return 1.0 / (1.0 + sum / static_cast<double>(triple_count));
}

double mod2_depth(const QueryDistances& q, const DistanceMatrix& dm) {
  return DepthEvaluator(dm, DepthMethod::MOD2)(q);
}

double mld_depth(const QueryDistances& q, const DistanceMatrix& dm) {
  return DepthEvaluator(dm, DepthMethod::MLD)(q);
}

double msd_depth(const QueryDistances& q, const DistanceMatrix& dm) {
  return DepthEvaluator(dm, DepthMethod::MSD)(q);
}

double mhd_depth(std::span<const double> anchors_q, std::span<const double> anchor_columns,
                 std::size_t n) {
  const std::size_t anchors = anchors_q.size();
  if (anchors == 0) throw InvalidArgument("half-space depth needs at least one anchor");
  if (n == 0) throw InsufficientSample("half-space depth needs a nonempty sample");
  if (anchor_columns.size() != n * anchors) {
    throw InvalidArgument("anchor distance table must be n x anchors");
  }
  std::vector<double> rows(anchors * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < anchors; ++a) rows[a * n + i] = anchor_columns[i * anchors + a];
  const auto counts = halfspace_counts(rows, anchors, n);
  return mhd_from_counts(anchors_q, counts, anchors, n);
}

double mhd_depth(const QueryDistances& q, const DistanceMatrix& dm) {
  return DepthEvaluator(dm, DepthMethod::MHD)(q);
}

double mhd_depth(const QueryDistances& q, const DistanceMatrix& dm,
                 std::span<const std::size_t> anchors) {
  require_matching(q, dm);
  require_sample(DepthMethod::MHD, dm.size());
  if (anchors.empty()) throw InvalidArgument("half-space depth needs at least one anchor");
  const auto rows = anchor_rows_from(dm, anchors);
  const auto counts = halfspace_counts(rows, anchors.size(), dm.size());
  std::vector<double> anchors_q(anchors.size());
  for (std::size_t a = 0; a < anchors.size(); ++a) anchors_q[a] = q.to_sample[anchors[a]];
  return mhd_from_counts(anchors_q, counts, anchors.size(), dm.size());
}

double depth(DepthMethod method, const QueryDistances& q, const DistanceMatrix& dm) {
  return DepthEvaluator(dm, method)(q);
}

DepthReport depth_all_sample(const DistanceMatrix& dm, DepthMethod method) {
  const std::size_t n = dm.size();
  require_sample(method, n);
  const auto start = std::chrono::steady_clock::now();

  DepthReport report;
  report.method = method;
  report.values.assign(n, 0.0);

  const DepthEvaluator evaluate(dm, method);
  parallel_for(n, [&](std::size_t i) { report.values[i] = evaluate(dm.row(i)); });

  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double euclidean_oja_depth(const std::vector<EuclideanPoint>& points, const EuclideanPoint& x) {
  const std::size_t p = x.dim();
  const std::size_t n = points.size();
  if (p == 0) throw InvalidArgument("Oja depth needs a positive dimension");
  for (const auto& pt : points) {
    if (pt.dim() != p) throw InvalidArgument("Oja depth needs points of equal dimension");
  }
  if (n < p) {
    throw InsufficientSample("Oja depth in R^" + std::to_string(p) + " needs at least " +
                             std::to_string(p) + " points, got " + std::to_string(n));
  }

  std::vector<std::size_t> idx(p);
  for (std::size_t t = 0; t < p; ++t) idx[t] = t;
  const auto dim = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd a(dim, dim);
  double sum = 0.0;
  double count = 0.0;
  for (;;) {
    for (std::size_t t = 0; t < p; ++t) {
      a.col(static_cast<Eigen::Index>(t)) = points[idx[t]].coords() - x.coords();
    }
    sum += std::abs(a.determinant());
    count += 1.0;
    // Next p-subset in lexicographic order.
    std::size_t t = p;
    while (t > 0 && idx[t - 1] == n - p + t - 1) --t;
    if (t == 0) break;
    ++idx[t - 1];
    for (std::size_t u = t; u < p; ++u) idx[u] = idx[u - 1] + 1;
  }
  return 1.0 / (1.0 + sum / count);
}

}  // namespace mdepth
