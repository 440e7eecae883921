#include "mdepth/deepest.hpp"

#include "mdepth/errors.hpp"
#include "mdepth/parallel.hpp"

#include <algorithm>
#include <numeric>

namespace mdepth {

std::vector<std::size_t> rank_by_depth(const std::vector<double>& depths) {
  std::vector<std::size_t> order(depths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return depths[a] > depths[b]; });
  return order;
}

InSampleDeepest deepest_in_sample(const DistanceMatrix& dm, DepthMethod method) {
  const DepthReport report = depth_all_sample(dm, method);
  const auto best = std::max_element(report.values.begin(), report.values.end());
  return {static_cast<std::size_t>(best - report.values.begin()), *best};
}

DeepestResult deepest_out_of_sample(const std::vector<CorrelationMatrix>& sample, DepthMethod method,
                                    double tsh, const OptimizerConfig& cfg,
                                    const DistanceMatrix* dm) {
  if (sample.size() < minimum_sample_size(method)) {
    throw InsufficientSample(std::string(to_string(method)) + " needs at least " +
                             std::to_string(minimum_sample_size(method)) + " sample objects");
  }
  if (sample.size() < 2) throw InsufficientSample("out-of-sample search needs at least 2 objects");
  if (!(cfg.half_width > 0.0)) throw InvalidArgument("box half-width must be positive");
  if (cfg.starts < 1) throw InvalidArgument("at least one start is required");

  const ObjectSet objects(std::vector<Object>(sample.begin(), sample.end()));
  DistanceMatrix local;
  if (dm == nullptr) {
    local = distance_matrix(objects, Metric::Spd);
    dm = &local;
  } else if (dm->size() != sample.size()) {
    throw InvalidArgument("distance matrix size does not match the sample");
  }

  const std::size_t p = sample.front().dim();
  const CholeskyChart chart(p);
  const auto n = static_cast<Eigen::Index>(sample.size());
  Eigen::MatrixXd data(n, static_cast<Eigen::Index>(chart.coordinate_dim()));
  for (Eigen::Index i = 0; i < n; ++i) {
    data.row(i) = cholesky_encode(sample[static_cast<std::size_t>(i)]).transpose();
  }
  const PcaModel pca = pca_fit(data, tsh);

  const DepthEvaluator evaluate(*dm, method);
  const Objective objective = [&](const Eigen::VectorXd& w) {
    try {
      const Object x = chart.decode(pca.decode(w));
      return evaluate(query_distances(x, objects, Metric::Spd));
    } catch (const Error&) {
      return -1.0;
    }
  };

  const std::vector<std::size_t> ranking = rank_by_depth(depth_all_sample(*dm, method).values);
  const std::size_t starts = std::min(cfg.starts, sample.size());

  struct Run {
    OptimizeResult result;
    double start_value = 0.0;
  };
  std::vector<Run> runs(starts);
  parallel_for(starts, [&](std::size_t k) {
    const Eigen::VectorXd w0 = pca.encode(data.row(static_cast<Eigen::Index>(ranking[k])).transpose());
    const Eigen::VectorXd lower = w0.array() - cfg.half_width;
    const Eigen::VectorXd upper = w0.array() + cfg.half_width;
    runs[k].start_value = objective(w0);
    runs[k].result = optimize_box(objective, w0, lower, upper, cfg);
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < starts; ++k) {
    if (runs[k].result.value > runs[best].result.value) best = k;
  }
  if (runs[best].result.value < 0.0) {
    throw DegenerateDecode("no start decodes to a valid correlation matrix");
  }

  DeepestResult out{std::get<CorrelationMatrix>(chart.decode(pca.decode(runs[best].result.argmax))),
                    runs[best].result.value,
                    ranking[best],
                    0.0,
                    0,
                    pca.r};
  for (const Run& run : runs) {
    out.start_depth = std::max(out.start_depth, run.start_value);
    out.evaluations += run.result.evaluations;
  }
  return out;
}

}  // namespace mdepth
