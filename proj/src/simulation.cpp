#include "mdepth/simulation.hpp"

#include "mdepth/errors.hpp"
#include "mdepth/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace mdepth {

namespace {

void validate_common(std::size_t p, std::size_t n, double eps, std::size_t reps) {
  if (p < 2) throw InvalidArgument("p must be at least 2");
  if (n < 4) throw InvalidArgument("n must be at least 4");
  if (reps < 1) throw InvalidArgument("reps must be at least 1");
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in [0, 1)");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void summarize(ExperimentColumn& column) {
  const auto reps = static_cast<double>(column.errors.size());
  column.mean_error = std::accumulate(column.errors.begin(), column.errors.end(), 0.0) / reps;
  column.mean_seconds = std::accumulate(column.seconds.begin(), column.seconds.end(), 0.0) / reps;
  double ss = 0.0;
  for (double e : column.errors) ss += (e - column.mean_error) * (e - column.mean_error);
  column.sd_error = column.errors.size() > 1 ? std::sqrt(ss / (reps - 1.0)) : 0.0;
}

}  // namespace

void validate(const CorrSimConfig& cfg) { validate_common(cfg.p, cfg.n, cfg.eps, cfg.reps); }

void validate(const SphereSimConfig& cfg) {
  validate_common(cfg.p, cfg.n, cfg.eps, cfg.reps);
  if (cfg.lambda_bulk == 0.0) throw InvalidArgument("lambda_bulk must be nonzero");
}

Eigen::MatrixXd random_orthogonal(std::size_t p, Rng& rng) {
  if (p < 1) throw InvalidArgument("random_orthogonal needs p >= 1");
  std::normal_distribution<double> normal;
  const auto dim = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) z(i, j) = normal(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

GeneratedSample gen_correlation_sample(const CorrSimConfig& cfg, Rng& rng) {
  validate(cfg);
  std::bernoulli_distribution outlier(cfg.eps);
  std::normal_distribution<double> normal;
  const auto p = static_cast<Eigen::Index>(cfg.p);
  std::vector<Object> objects;
  objects.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const double nu = outlier(rng) ? cfg.nu_out : cfg.nu_bulk;
    Eigen::VectorXd spectrum(p);
    spectrum(0) = std::exp(nu + normal(rng));
    for (Eigen::Index k = 1; k < p; ++k) spectrum(k) = std::exp(-nu + normal(rng));
    const Eigen::MatrixXd u = random_orthogonal(cfg.p, rng);
    const Eigen::MatrixXd s = u * spectrum.asDiagonal() * u.transpose();
    const Eigen::VectorXd inv_sd = s.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd x = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
    x = 0.5 * (x + x.transpose()).eval();
    x.diagonal().setOnes();
    objects.emplace_back(CorrelationMatrix(std::move(x)));
  }
  return {ObjectSet(std::move(objects)), CorrelationMatrix::identity(cfg.p)};
}

GeneratedSample gen_sphere_sample(const SphereSimConfig& cfg, Rng& rng) {
  validate(cfg);
  std::bernoulli_distribution outlier(cfg.eps);
  std::normal_distribution<double> normal;
  const auto p = static_cast<Eigen::Index>(cfg.p);
  std::vector<Object> objects;
  objects.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const double lambda = outlier(rng) ? cfg.lambda_out : cfg.lambda_bulk;
    Eigen::VectorXd z(p);
    double norm = 0.0;
    do {
      for (Eigen::Index k = 0; k < p; ++k) z(k) = lambda + normal(rng);
      norm = z.norm();
    } while (norm == 0.0);
    objects.emplace_back(UnitVector::normalized(z / norm));
  }
  const double sign = cfg.lambda_bulk > 0.0 ? 1.0 : -1.0;
  Eigen::VectorXd center = Eigen::VectorXd::Constant(p, sign / std::sqrt(static_cast<double>(p)));
  return {ObjectSet(std::move(objects)), UnitVector::normalized(std::move(center))};
}

Dataset gen_histogram_groups(std::size_t n1, std::size_t n2, double shift, std::size_t bins,
                             std::uint64_t seed, std::size_t draws) {
  if (n1 < 2 || n2 < 2) throw InvalidArgument("each histogram group needs at least 2 members");
  if (bins < 1) throw InvalidArgument("bins must be at least 1");
  if (draws < 1) throw InvalidArgument("draws must be at least 1");
  if (!std::isfinite(shift)) throw InvalidArgument("shift must be finite");

  const double lo = std::min(0.0, shift) - 4.0;
  const double hi = std::max(0.0, shift) + 4.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> edges(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) edges[k] = lo + width * static_cast<double>(k);
  edges.back() = hi;

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  Dataset out;
  std::vector<Object> objects;
  for (std::size_t i = 0; i < n1 + n2; ++i) {
    const bool group_b = i >= n1;
    std::vector<double> masses(bins, 0.0);
    for (std::size_t k = 0; k < draws; ++k) {
      const double x = std::clamp(normal(rng) + (group_b ? shift : 0.0), lo, hi);
      const auto bin = std::min(bins - 1, static_cast<std::size_t>((x - lo) / width));
      masses[bin] += 1.0;
    }
    objects.emplace_back(Histogram::normalized(edges, std::move(masses)));
    out.labels.emplace_back(group_b ? "B" : "A");
  }
  out.objects = ObjectSet(std::move(objects));
  return out;
}

std::string_view to_string(Estimator estimator) {
  switch (estimator) {
    case Estimator::InSample: return "in-sample";
    case Estimator::OutOfSample: return "out-of-sample";
    case Estimator::RandomPick: return "random";
  }
  return "unknown";
}

std::string ExperimentColumn::name() const {
  if (!method) return std::string(to_string(estimator));
  std::string out(to_string(*method));
  if (estimator == Estimator::OutOfSample) out += "-oos";
  return out;
}

std::size_t replicate_count(const ExperimentSpec& spec) {
  return spec.space == SimSpace::Correlation ? spec.corr.reps : spec.sphere.reps;
}

std::uint64_t experiment_seed(const ExperimentSpec& spec) {
  return spec.space == SimSpace::Correlation ? spec.corr.seed : spec.sphere.seed;
}

ExperimentReport run_location_experiment(const ExperimentSpec& spec) {
  const bool corr = spec.space == SimSpace::Correlation;
  if (corr) {
    validate(spec.corr);
  } else {
    validate(spec.sphere);
  }
  if (spec.methods.empty() && !spec.baseline) {
    throw InvalidArgument("experiment needs at least one method or the random-pick baseline");
  }
  if (spec.out_of_sample && !corr) {
    throw InvalidArgument("out-of-sample supports metric spd only");
  }
  if (spec.out_of_sample && spec.methods.empty()) {
    throw InvalidArgument("out-of-sample estimation needs at least one method");
  }
  const std::size_t n = corr ? spec.corr.n : spec.sphere.n;
  for (DepthMethod m : spec.methods) {
    if (n < minimum_sample_size(m)) {
      throw InsufficientSample(std::string(to_string(m)) + " needs a larger sample");
    }
  }

  const Metric metric = corr ? Metric::Spd : Metric::Sphere;
  const std::size_t reps = replicate_count(spec);
  const std::uint64_t seed = experiment_seed(spec);

  ExperimentReport report;
  report.spec = spec;
  auto add_column = [&](Estimator estimator, std::optional<DepthMethod> method) {
    ExperimentColumn column;
    column.estimator = estimator;
    column.method = method;
    report.columns.push_back(std::move(column));
  };
  for (DepthMethod m : spec.methods) add_column(Estimator::InSample, m);
  if (spec.out_of_sample) {
    for (DepthMethod m : spec.methods) add_column(Estimator::OutOfSample, m);
  }
  if (spec.baseline) add_column(Estimator::RandomPick, std::nullopt);
  for (auto& column : report.columns) {
    column.errors.assign(reps, 0.0);
    column.seconds.assign(reps, 0.0);
    if (column.estimator == Estimator::OutOfSample) {
      column.depths.assign(reps, 0.0);
      column.start_depths.assign(reps, 0.0);
    }
  }

  parallel_for(reps, [&](std::size_t r) {
    const std::uint64_t rep_seed = child_seed(seed, r);
    Rng rng = make_rng(rep_seed);
    const GeneratedSample sample =
        corr ? gen_correlation_sample(spec.corr, rng) : gen_sphere_sample(spec.sphere, rng);
    const DistanceMatrix dm = distance_matrix(sample.objects, metric);

    std::vector<CorrelationMatrix> matrices;
    if (spec.out_of_sample) {
      for (const Object& o : sample.objects.objects()) matrices.push_back(std::get<CorrelationMatrix>(o));
    }

    for (auto& column : report.columns) {
      const auto start = std::chrono::steady_clock::now();
      switch (column.estimator) {
        case Estimator::InSample: {
          const InSampleDeepest best = deepest_in_sample(dm, *column.method);
          column.seconds[r] = seconds_since(start);
          column.errors[r] = distance(sample.objects[best.index], sample.center, metric);
          break;
        }
        case Estimator::OutOfSample: {
          const DeepestResult best = deepest_out_of_sample(
              matrices, *column.method, spec.out_of_sample->tsh, spec.out_of_sample->optimizer, &dm);
          column.seconds[r] = seconds_since(start);
          column.errors[r] = spd_distance(best.object, std::get<CorrelationMatrix>(sample.center));
          column.depths[r] = best.depth;
          column.start_depths[r] = best.start_depth;
          break;
        }
        case Estimator::RandomPick: {
          Rng pick_rng = make_rng(child_seed(rep_seed, 1));
          std::uniform_int_distribution<std::size_t> pick(0, n - 1);
          const std::size_t index = pick(pick_rng);
          column.seconds[r] = seconds_since(start);
          column.errors[r] = distance(sample.objects[index], sample.center, metric);
          break;
        }
      }
    }
  });

  for (auto& column : report.columns) summarize(column);
  return report;
}

}  // namespace mdepth
