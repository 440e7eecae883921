// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "mdepth/deepest.hpp"
#include "mdepth/depths.hpp"
#include "mdepth/errors.hpp"
#include "mdepth/inference.hpp"
#include "mdepth/metric_core.hpp"
#include "mdepth/metric_spaces.hpp"
#include "mdepth/simulation.hpp"

#include "support.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace mdepth;
namespace ts = testing_support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  if (!out.pass) ++failures;
  std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << id << " " << name << ":"
            << out.detail.str() << " (" << seconds_since(start) << " s)" << std::endl;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::array<double, 3> query_triple(const QueryDistances& q, std::size_t i, std::size_t j, std::size_t k) {
  return {q.to_sample[i], q.to_sample[j], q.to_sample[k]};
}

Matrix3 pair_triple(const DistanceMatrix& dm, std::size_t i, std::size_t j, std::size_t k) {
  const std::size_t idx[3] = {i, j, k};
  Matrix3 m{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m[a][b] = dm(idx[a], idx[b]);
  return m;
}

// 1 ------------------------------------------------------------------------------

void euclidean_equivalence(Outcome& out) {
  const auto start = Clock::now();
  auto g = ts::rng(101);
  std::uniform_int_distribution<std::size_t> size(3, 8);
  double worst_rel = 0.0;      // the X1, X2, X3 triple of each configuration
  double worst_rel_all = 0.0;  // every triple, reported only
  double min_det = 0.0;
  std::size_t triples = 0;
  for (int c = 0; c < 200; ++c) {
    const auto pts = ts::gaussian_points(size(g), 3, g);
    const Eigen::VectorXd x = ts::gaussian_points(1, 3, g)[0];
    const auto dm = ts::euclidean_dm(pts);
    const auto q = ts::euclidean_q(pts, x);
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
          const double det = b3_matrix(query_triple(q, i, j, k), pair_triple(dm, i, j, k)).determinant();
          Eigen::Matrix3d diff;
          diff << pts[i] - x, pts[j] - x, pts[k] - x;
          const double oracle = diff.determinant() * diff.determinant();
          const double rel = std::abs(det - oracle) / std::abs(oracle);
          if (i == 0 && j == 1 && k == 2) worst_rel = std::max(worst_rel, rel);
          worst_rel_all = std::max(worst_rel_all, rel);
          min_det = std::min(min_det, det);
          ++triples;
        }
  }
  out.detail << " R^3 max rel err=" << worst_rel << " min det B3=" << min_det << " (all " << triples
             << " triples: max rel err=" << worst_rel_all << ")";
  out.require(worst_rel <= 1e-8, "relative error <= 1e-8");
  out.require(min_det >= -1e-10, "det B3 >= -1e-10");

  double worst_abs = 0.0;
  for (int c = 0; c < 100; ++c) {
    const auto pts = ts::gaussian_points(size(g), 2, g);
    const Eigen::VectorXd x = ts::gaussian_points(1, 2, g)[0];
    std::vector<EuclideanPoint> sample;
    for (const auto& p : pts) sample.emplace_back(p);
    const double oja = euclidean_oja_depth(sample, EuclideanPoint(x));
    const double mod2 = mod2_depth(ts::euclidean_q(pts, x), ts::euclidean_dm(pts));
    worst_abs = std::max(worst_abs, std::abs(oja - mod2));
  }
  out.detail << "; R^2 max |MOD2 - Oja|=" << worst_abs;
  out.require(worst_abs <= 1e-10, "|MOD2 - Oja| <= 1e-10");
  out.require(seconds_since(start) < 10.0, "runtime < 10 s");
}

// 2 ------------------------------------------------------------------------------

void bounds(Outcome& out) {
  const auto start = Clock::now();
  auto g = ts::rng(202);
  const std::array<const char*, 4> names{"corr", "sphere", "hist", "eucl"};
  const std::array<Metric, 4> metrics{Metric::Spd, Metric::Sphere, Metric::Wasserstein, Metric::Euclidean};
  for (std::size_t s = 0; s < 4; ++s) {
    double worst2 = 0.0;  // most negative det B2 / scale
    double worst3 = 0.0;  // most negative radicand / scale
    for (int t = 0; t < 1000; ++t) {
      std::vector<Object> objs;
      for (int k = 0; k < 4; ++k) {
        switch (s) {
          case 0: objs.emplace_back(CorrelationMatrix(ts::random_correlation(3, g))); break;
          case 1: objs.emplace_back(UnitVector(ts::random_unit(3, g))); break;
          case 2: objs.emplace_back(ts::random_histogram(g)); break;
          default: objs.emplace_back(EuclideanPoint(ts::gaussian_points(1, 3, g)[0])); break;
        }
      }
      std::array<double, 3> dx{};
      Matrix3 dp{};
      double max_sq = 0.0;
      for (int a = 0; a < 3; ++a) {
        dx[a] = distance(objs[0], objs[a + 1], metrics[s]);
        max_sq = std::max(max_sq, dx[a] * dx[a]);
        for (int b = a + 1; b < 3; ++b) {
          dp[a][b] = dp[b][a] = distance(objs[a + 1], objs[b + 1], metrics[s]);
          max_sq = std::max(max_sq, dp[a][b] * dp[a][b]);
        }
      }
      const double scale2 = std::max(1.0, max_sq * max_sq);
      const double scale3 = std::max(1.0, max_sq * max_sq * max_sq);
      worst2 = std::min(worst2, b2_matrix({dx[0], dx[1]}, dp[0][1]).determinant() / scale2);
      worst3 = std::min(worst3, oja3_radicand(dx, dp) / scale3);
    }
    out.detail << " " << names[s] << ": min detB2/scale=" << worst2 << " min radicand/scale=" << worst3;
    out.require(worst2 >= -1e-9, std::string(names[s]) + " det B2 >= -1e-9 scale");
    out.require(worst3 >= -1e-6, std::string(names[s]) + " radicand >= -1e-6 scale");
  }

  const auto on_circle = [](double angle) {
    Eigen::VectorXd v(2);
    v << std::cos(angle), std::sin(angle);
    return UnitVector::normalized(v);
  };
  const double quarter = std::numbers::pi / 2.0;
  const UnitVector x = on_circle(0.0);
  const std::array<UnitVector, 3> pts{on_circle(quarter), on_circle(2 * quarter), on_circle(3 * quarter)};
  std::array<double, 3> dx{};
  Matrix3 dp{};
  for (int a = 0; a < 3; ++a) {
    dx[a] = sphere_distance(x, pts[a]);
    for (int b = a + 1; b < 3; ++b) dp[a][b] = dp[b][a] = sphere_distance(pts[a], pts[b]);
  }
  const double radicand = oja3_radicand(dx, dp);
  const double pi6 = std::pow(std::numbers::pi, 6);
  out.detail << "; circle radicand=" << radicand;
  out.require(std::abs(radicand) <= 1e-9 * pi6, "circle radicand within 1e-9 pi^6 of 0");
  out.require(seconds_since(start) < 30.0, "runtime < 30 s");
}

// 3 ------------------------------------------------------------------------------

void degenerate_line(Outcome& out) {
  auto g = ts::rng(303);
  std::normal_distribution<double> z(0.0, 3.0);
  std::uniform_int_distribution<std::size_t> size(2, 40);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> xs(size(g));
    for (double& v : xs) v = z(g);
    const double x = t % 4 == 0 ? xs[0] : z(g);
    worst = std::max(worst, std::abs(mod2_depth(ts::line_q(xs, x), ts::line_dm(xs)) - 1.0));
  }
  out.detail << " max |MOD2 - 1|=" << worst;
  out.require(worst <= 1e-12, "|MOD2 - 1| <= 1e-12");
}

// 4 ------------------------------------------------------------------------------

void ranges(Outcome& out) {
  auto g = ts::rng(404);
  std::uniform_int_distribution<int> space(0, 3);
  std::uniform_int_distribution<std::size_t> size(4, 12);
  std::bernoulli_distribution member(0.3);
  const std::array<Metric, 4> metrics{Metric::Spd, Metric::Sphere, Metric::Wasserstein, Metric::Euclidean};
  for (DepthMethod method : kAllMethods) {
    std::size_t violations = 0;
    double lo = 1e300;
    double hi = -1e300;
    for (int t = 0; t < 1000; ++t) {
      const int s = space(g);
      const std::size_t n = size(g) + 1;
      std::vector<Object> objs;
      for (std::size_t k = 0; k < n; ++k) {
        switch (s) {
          case 0: objs.emplace_back(CorrelationMatrix(ts::random_correlation(3, g))); break;
          case 1: objs.emplace_back(UnitVector(ts::random_unit(3, g))); break;
          case 2: objs.emplace_back(ts::random_histogram(g)); break;
          default: objs.emplace_back(EuclideanPoint(ts::gaussian_points(1, 2, g)[0])); break;
        }
      }
      const Object query = member(g) ? objs[1] : objs[0];
      const ObjectSet sample(std::vector<Object>(objs.begin() + 1, objs.end()));
      const DistanceMatrix dm = distance_matrix(sample, metrics[s]);
      const double v = depth(method, query_distances(query, sample, metrics[s]), dm);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (!(v >= 0.0 && v <= depth_upper_bound(method))) ++violations;
    }
    out.detail << " " << to_string(method) << " [" << lo << ", " << hi << "] violations=" << violations;
    out.require(violations == 0, std::string(to_string(method)) + " in range");
  }
  out.require(depth_upper_bound(DepthMethod::MSD) == 2.0 && depth_upper_bound(DepthMethod::MOD3) == 1.0,
              "upper bounds are 2 for MSD and 1 otherwise");
}

// 5 ------------------------------------------------------------------------------

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
  auto g = ts::rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> xs(n);
  for (double& v : xs) v = z(g);
  return xs;
}

void vanishing(Outcome& out) {
  const auto xs = normal_sample(100, 505);
  const DistanceMatrix dm = ts::line_dm(xs);
  const DepthEvaluator eval(dm, DepthMethod::MOD3);
  std::vector<double> values;
  for (double x : {2.0, 10.0, 100.0, 1000.0}) values.push_back(eval(ts::line_q(xs, x)));
  out.detail << " depths at 2,10,100,1000 =";
  for (double v : values) out.detail << " " << v;
  for (std::size_t k = 1; k < values.size(); ++k) out.require(values[k] < values[k - 1], "strictly decreasing");
  out.require(values.back() < 1e-3, "depth at 1000 < 1e-3");
}

// 6 ------------------------------------------------------------------------------

void consistency(Outcome& out) {
  const auto start = Clock::now();
  std::array<double, 2> sd{};
  const std::array<std::size_t, 2> sizes{50, 200};
  for (std::size_t s = 0; s < 2; ++s) {
    std::vector<double> values;
    for (std::uint64_t r = 0; r < 50; ++r) {
      const auto xs = normal_sample(sizes[s], 6000 + 100 * s + r);
      values.push_back(mod3_depth(ts::line_q(xs, 0.0), ts::line_dm(xs)));
    }
    sd[s] = sample_sd(values);
  }
  const double ratio = sd[0] / sd[1];
  out.detail << " SD n=50: " << sd[0] << " SD n=200: " << sd[1] << " ratio=" << ratio;
  out.require(ratio >= 1.7, "SD ratio >= 1.7");
  out.require(seconds_since(start) < 120.0, "runtime < 2 min");
}

// 7 ------------------------------------------------------------------------------

const ExperimentColumn& column(const ExperimentReport& rep, Estimator est, std::optional<DepthMethod> m) {
  for (const auto& c : rep.columns)
    if (c.estimator == est && c.method == m) return c;
  throw std::runtime_error("missing report column");
}

void correlation_simulation(Outcome& out) {
  const auto start = Clock::now();
  ExperimentSpec spec;
  spec.space = SimSpace::Correlation;
  spec.corr.p = 3;
  spec.corr.eps = 0.05;
  spec.corr.reps = 50;
  spec.corr.seed = 707;
  spec.methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
  spec.corr.n = 10;
  const ExperimentReport small = run_location_experiment(spec);
  spec.corr.n = 60;
  const ExperimentReport large = run_location_experiment(spec);
  for (DepthMethod m : kAllMethods) {
    const double e10 = column(small, Estimator::InSample, m).mean_error;
    const double e60 = column(large, Estimator::InSample, m).mean_error;
    out.detail << " " << to_string(m) << " " << e10 << "->" << e60;
    out.require(e60 < e10, std::string(to_string(m)) + " error lower at n=60");
  }
  out.require(column(large, Estimator::InSample, DepthMethod::MOD3).mean_error <=
                  column(large, Estimator::InSample, DepthMethod::MHD).mean_error,
              "MOD3 <= MHD at n=60");
  out.require(seconds_since(start) < 600.0, "runtime < 10 min");
}

// 8 ------------------------------------------------------------------------------

void sphere_baseline(Outcome& out) {
  const auto start = Clock::now();
  ExperimentSpec spec;
  spec.space = SimSpace::Sphere;
  spec.sphere.p = 50;
  spec.sphere.n = 100;
  spec.sphere.eps = 0.10;
  spec.sphere.lambda_bulk = 5.0;
  spec.sphere.lambda_out = -1.0;
  spec.sphere.reps = 100;
  spec.sphere.seed = 808;
  spec.baseline = true;
  const ExperimentReport rep = run_location_experiment(spec);
  const double m = column(rep, Estimator::RandomPick, std::nullopt).mean_error;
  out.detail << " random-pick mean error=" << m;

  // Expected error of a uniform pick given each sample, on the same replicate samples.
  std::vector<double> expected(spec.sphere.reps);
  for (std::size_t r = 0; r < spec.sphere.reps; ++r) {
    Rng rng = make_rng(child_seed(spec.sphere.seed, r));
    const GeneratedSample sample = gen_sphere_sample(spec.sphere, rng);
    double sum = 0.0;
    for (const Object& o : sample.objects.objects()) sum += distance(o, sample.center, Metric::Sphere);
    expected[r] = sum / static_cast<double>(sample.objects.size());
  }
  out.detail << " (per-sample expected pick error=" << mean(expected)
             << ", SE of a single-pick mean=" << sample_sd(column(rep, Estimator::RandomPick, std::nullopt).errors) / 10.0
             << ")";
  out.require(std::abs(m - 0.413) <= 0.03, "within 0.413 +/- 0.03");
  out.require(seconds_since(start) < 120.0, "runtime < 2 min");
}

// 9 ------------------------------------------------------------------------------

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  CliResult r;
  FILE* pipe = popen((std::string(MDEPTH_CLI) + " " + args + " 2>&1").c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

constexpr std::size_t kReducedMaxEvals = 200;

void out_of_sample(Outcome& out) {
  const auto start = Clock::now();
  ExperimentSpec spec;
  spec.space = SimSpace::Correlation;
  spec.corr.p = 5;
  spec.corr.n = 20;
  spec.corr.eps = 0.10;
  spec.corr.reps = 50;
  spec.corr.seed = 909;
  spec.methods = {DepthMethod::MOD3};
  spec.out_of_sample = OutOfSampleSettings{};
  spec.out_of_sample->optimizer.algorithm = OptimizerKind::SimplexBox;
  const ExperimentReport rep = run_location_experiment(spec);
  const double full_seconds = seconds_since(start);
  const auto& ins = column(rep, Estimator::InSample, DepthMethod::MOD3);
  const auto& oos = column(rep, Estimator::OutOfSample, DepthMethod::MOD3);
  std::size_t below_start = 0;
  for (std::size_t r = 0; r < oos.depths.size(); ++r)
    if (oos.depths[r] < oos.start_depths[r]) ++below_start;
  out.detail << " in-sample=" << ins.mean_error << " out-of-sample=" << oos.mean_error
             << " runs below start=" << below_start << "/" << oos.depths.size() << " full profile "
             << full_seconds << " s";
  out.require(oos.mean_error <= ins.mean_error, "out-of-sample error <= in-sample error");
  out.require(below_start == 0 && oos.depths.size() == 50, "every run >= its best start");
  out.require(full_seconds < 1800.0, "full profile < 30 min");

  const auto reduced_start = Clock::now();
  const CliResult reduced = run_cli(
      "simulate-corr --p 5 --n 20 --eps 0.1 --reps 50 --methods MOD3 --out-of-sample --optimizer simplex "
      "--max-evals " + std::to_string(kReducedMaxEvals) + " --seed 909 --format csv");
  const double reduced_seconds = seconds_since(reduced_start);
  out.detail << "; reduced --max-evals " << kReducedMaxEvals << " profile " << reduced_seconds << " s";
  out.require(reduced.code == 0, "reduced profile exits 0");
  out.require(reduced_seconds < 600.0, "reduced profile < 10 min");
}

// 10 -----------------------------------------------------------------------------

double median_seconds(const std::function<void()>& work, int repeats) {
  std::vector<double> t;
  for (int k = 0; k < repeats; ++k) {
    const auto start = Clock::now();
    work();
    t.push_back(seconds_since(start));
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

void mhd_precomputation(Outcome& out) {
  auto g = ts::rng(1010);
  const auto pts20 = ts::gaussian_points(20, 3, g);
  const DistanceMatrix dm20 = ts::euclidean_dm(pts20);
  const DepthReport all = depth_all_sample(dm20, DepthMethod::MHD);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < dm20.size(); ++i)
    if (all.values[i] != mhd_depth(QueryDistances::from_row(dm20, i), dm20)) ++mismatches;
  out.detail << " mismatches=" << mismatches;
  out.require(mismatches == 0, "depth_all_sample(MHD) == per-query mhd_depth");

  const auto pts40 = ts::gaussian_points(40, 3, g);
  const DistanceMatrix dm40 = ts::euclidean_dm(pts40);
  std::array<double, 2> ratio{};
  const std::array<DepthMethod, 2> methods{DepthMethod::MHD, DepthMethod::MOD3};
  const std::array<int, 2> repeats{15, 7};
  for (std::size_t m = 0; m < 2; ++m) {
    const auto time_of = [&](const DistanceMatrix& dm) {
      return median_seconds([&] { (void)depth_all_sample(dm, methods[m]); }, repeats[m]);
    };
    ratio[m] = time_of(dm40) / time_of(dm20);
  }
  const bool soft_mhd = ratio[0] >= 4.0 && ratio[0] <= 16.0;
  const bool soft_mod3 = ratio[1] >= 8.0 && ratio[1] <= 32.0;
  out.detail << "; timing ratio n=40/n=20 MHD=" << ratio[0] << (soft_mhd ? " (in [4,16])" : " (soft: outside [4,16])")
             << " MOD3=" << ratio[1] << (soft_mod3 ? " (in [8,32])" : " (soft: outside [8,32])");
}

// 11 -----------------------------------------------------------------------------

void permutation_calibration(Outcome& out) {
  const auto start = Clock::now();
  constexpr std::size_t kBins = 20;
  std::size_t null_rejections = 0;
  for (std::uint64_t r = 0; r < 200; ++r) {
    const Dataset data = gen_histogram_groups(20, 20, 0.0, kBins, child_seed(1111, r));
    const auto rep = permutation_test(data, Metric::Wasserstein, DepthMethod::MOD3, 200, child_seed(2222, r));
    if (rep.p_value < 0.05) ++null_rejections;
  }
  std::size_t shifted_rejections = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const Dataset data = gen_histogram_groups(20, 20, 3.0, kBins, child_seed(3333, r));
    const auto rep = permutation_test(data, Metric::Wasserstein, DepthMethod::MOD3, 200, child_seed(4444, r));
    if (rep.p_value < 0.05) ++shifted_rejections;
  }
  const double null_rate = static_cast<double>(null_rejections) / 200.0;
  const double power = static_cast<double>(shifted_rejections) / 100.0;
  out.detail << " shift=0 rejection rate=" << null_rate << " shift=3 rejection rate=" << power;
  out.require(null_rate >= 0.02 && null_rate <= 0.09, "null rate in [0.02, 0.09]");
  out.require(power >= 0.95, "shift=3 rejects in >= 95% of runs");
  out.require(seconds_since(start) < 600.0, "runtime < 10 min");
}

}  // namespace

int main() {
  std::cout.precision(6);
  report(1, "Euclidean Oja equivalence", euclidean_equivalence);
  report(2, "kernel bounds", bounds);
  report(3, "MOD2 identity on the line", degenerate_line);
  report(4, "depth ranges", ranges);
  report(5, "vanishing at infinity", vanishing);
  report(6, "consistency of MOD3", consistency);
  report(7, "correlation simulation", correlation_simulation);
  report(8, "sphere random-pick baseline", sphere_baseline);
  report(9, "out-of-sample improvement", out_of_sample);
  report(10, "MHD precomputation and complexity", mhd_precomputation);
  report(11, "permutation-test calibration", permutation_calibration);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria FAILED") << std::endl;
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
