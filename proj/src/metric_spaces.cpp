#include "mdepth/metric_spaces.hpp"

#include "mdepth/errors.hpp"
#include "mdepth/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

namespace mdepth {

namespace {

std::atomic<std::size_t> g_distance_matrix_builds{0};

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pd_eigen(const Eigen::MatrixXd& a, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrized(a));
  if (eig.info() != Eigen::Success) {
    throw NotPositiveDefinite(std::string("eigendecomposition failed for ") + what);
  }
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(smallest > 1e-12)) {
    throw NotPositiveDefinite(std::string(what) + " is not positive definite (smallest eigenvalue " +
                              std::to_string(smallest) + ")");
  }
  return eig;
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  const auto p = entries_.rows();
  if (p < 1 || entries_.cols() != p) throw InvalidArgument("correlation matrix must be square");
  if (!entries_.allFinite()) throw InvalidArgument("correlation matrix has non-finite entries");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(entries_(i, i) - 1.0) > 1e-10) {
      throw InvalidArgument("correlation matrix diagonal must be 1");
    }
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (std::abs(entries_(i, j) - entries_(j, i)) > 1e-10) {
        throw InvalidArgument("correlation matrix must be symmetric");
      }
    }
  }
  pd_eigen(entries_, "correlation matrix");
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t p) {
  const auto n = static_cast<Eigen::Index>(p);
  return CorrelationMatrix(Eigen::MatrixXd::Identity(n, n));
}

UnitVector::UnitVector(Eigen::VectorXd coords) : coords_(std::move(coords)) {
  if (coords_.size() < 1 || !coords_.allFinite()) throw InvalidArgument("unit vector needs finite coordinates");
  if (std::abs(coords_.norm() - 1.0) > 1e-10) throw InvalidArgument("vector does not have unit norm");
}

UnitVector UnitVector::normalized(Eigen::VectorXd coords, double tol) {
  if (coords.size() < 1 || !coords.allFinite()) throw InvalidArgument("unit vector needs finite coordinates");
  const double norm = coords.norm();
  if (std::abs(norm - 1.0) > tol) {
    throw InvalidArgument("vector norm " + std::to_string(norm) + " is not within " +
                          std::to_string(tol) + " of 1");
  }
  return UnitVector(coords / norm);
}

Histogram::Histogram(std::vector<double> edges, std::vector<double> masses)
    : edges_(std::move(edges)), masses_(std::move(masses)) {
  if (masses_.empty()) throw InvalidArgument("histogram needs at least one bin");
  if (edges_.size() != masses_.size() + 1) {
    throw InvalidArgument("histogram needs bins + 1 edges");
  }
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (!std::isfinite(edges_[k])) throw InvalidArgument("histogram edges must be finite");
    if (k > 0 && !(edges_[k] > edges_[k - 1])) {
      throw InvalidArgument("histogram edges must be strictly increasing");
    }
  }
  double total = 0.0;
  for (double m : masses_) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidArgument("histogram masses must be nonnegative");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-10) throw InvalidArgument("histogram masses must sum to 1");
}

Histogram Histogram::normalized(std::vector<double> edges, std::vector<double> masses) {
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidArgument("histogram masses must be nonnegative");
    total += m;
  }
  if (!(total > 0.0)) throw InvalidArgument("histogram has zero total mass");
  for (double& m : masses) m /= total;
  return Histogram(std::move(edges), std::move(masses));
}

Histogram Histogram::shifted(double c) const {
  Histogram h = *this;
  for (double& e : h.edges_) e += c;
  return h;
}

EuclideanPoint::EuclideanPoint(Eigen::VectorXd coords) : coords_(std::move(coords)) {
  if (!coords_.allFinite()) throw InvalidArgument("Euclidean point has non-finite coordinates");
}

std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Correlation: return "corr";
    case ObjectKind::Sphere: return "sphere";
    case ObjectKind::Histogram: return "hist";
    case ObjectKind::Euclidean: return "eucl";
  }
  return "unknown";
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Spd: return "spd";
    case Metric::Sphere: return "sphere";
    case Metric::Wasserstein: return "wass";
    case Metric::Euclidean: return "eucl";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "spd") return Metric::Spd;
  if (name == "sphere") return Metric::Sphere;
  if (name == "wass") return Metric::Wasserstein;
  if (name == "eucl") return Metric::Euclidean;
  throw InvalidArgument("unknown metric '" + std::string(name) + "' (expected spd|sphere|wass|eucl)");
}

ObjectKind kind_for(Metric metric) {
  switch (metric) {
    case Metric::Spd: return ObjectKind::Correlation;
    case Metric::Sphere: return ObjectKind::Sphere;
    case Metric::Wasserstein: return ObjectKind::Histogram;
    case Metric::Euclidean: return ObjectKind::Euclidean;
  }
  throw InvalidArgument("unknown metric");
}

ObjectKind kind_of(const Object& obj) {
  return static_cast<ObjectKind>(obj.index());
}

namespace {

std::size_t object_dim(const Object& obj) {
  return std::visit(
      [](const auto& o) -> std::size_t {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Histogram>) {
          return 0;  // histograms with different binnings are comparable
        } else {
          return o.dim();
        }
      },
      obj);
}

}  // namespace

ObjectSet::ObjectSet(std::vector<Object> objects) : objects_(std::move(objects)) {
  if (objects_.empty()) return;
  kind_ = kind_of(objects_.front());
  const std::size_t dim = object_dim(objects_.front());
  for (std::size_t i = 1; i < objects_.size(); ++i) {
    if (kind_of(objects_[i]) != *kind_) {
      throw InvalidArgument("object " + std::to_string(i) + " is a " +
                            std::string(to_string(kind_of(objects_[i]))) + ", set holds " +
                            std::string(to_string(*kind_)));
    }
    if (object_dim(objects_[i]) != dim) {
      throw InvalidArgument("object " + std::to_string(i) + " has dimension " +
                            std::to_string(object_dim(objects_[i])) + ", expected " +
                            std::to_string(dim));
    }
  }
}

ObjectSet ObjectSet::subset(const std::vector<std::size_t>& indices) const {
  std::vector<Object> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(objects_.at(i));
  return ObjectSet(std::move(out));
}

Eigen::MatrixXd spd_inverse_sqrt(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("SPD matrix must be square");
  const auto eig = pd_eigen(a, "first argument");
  const Eigen::VectorXd inv_sqrt = eig.eigenvalues().array().rsqrt();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

double spd_distance_from_inverse_sqrt(const Eigen::MatrixXd& a_inv_sqrt, const Eigen::MatrixXd& b) {
  if (b.rows() != b.cols() || b.rows() != a_inv_sqrt.rows()) {
    throw InvalidArgument("SPD distance needs square matrices of equal dimension");
  }
  const Eigen::MatrixXd m = a_inv_sqrt * b * a_inv_sqrt;
  const auto eig = pd_eigen(m, "second argument");
  return std::sqrt(eig.eigenvalues().array().log().square().sum());
}

double spd_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("SPD distance needs matrices of equal dimension");
  }
  return spd_distance_from_inverse_sqrt(spd_inverse_sqrt(a), b);
}

double spd_distance(const CorrelationMatrix& a, const CorrelationMatrix& b) {
  return spd_distance(a.entries(), b.entries());
}

double sphere_distance(const UnitVector& u, const UnitVector& v) {
  if (u.dim() != v.dim()) throw InvalidArgument("sphere distance needs equal dimensions");
  // Equal to arccos(<u, v>) for unit vectors, without its loss of precision
  // near 0 and pi.
  const double chord = (u.coords() - v.coords()).norm();
  const double cochord = (u.coords() + v.coords()).norm();
  return 2.0 * std::atan2(chord, cochord);
}

namespace {

struct QuantilePiece {
  double t0, t1;  // cumulative-probability interval
  double q0, q1;  // quantile values at its ends
  double at(double t) const { return q0 + (t - t0) / (t1 - t0) * (q1 - q0); }
};

std::vector<QuantilePiece> quantile_pieces(const Histogram& h) {
  const auto& e = h.edges();
  const auto& m = h.masses();
  const double total = std::accumulate(m.begin(), m.end(), 0.0);
  std::vector<QuantilePiece> pieces;
  double cum = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m[k] > 0.0) last_nonzero = k;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] <= 0.0) continue;
    const double t0 = cum;
    cum += m[k] / total;
    const double t1 = k == last_nonzero ? 1.0 : cum;
    if (t1 > t0) pieces.push_back({t0, t1, e[k], e[k + 1]});
  }
  return pieces;
}

}  // namespace

double wasserstein2_distance(const Histogram& h1, const Histogram& h2) {
  const auto a = quantile_pieces(h1);
  const auto b = quantile_pieces(h2);
  std::size_t ia = 0, ib = 0;
  double t = 0.0;
  double integral = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double t_hi = std::min(a[ia].t1, b[ib].t1);
    if (t_hi > t) {
      // Difference of two linear pieces is linear; integrate its square exactly.
      const double d0 = a[ia].at(t) - b[ib].at(t);
      const double d1 = a[ia].at(t_hi) - b[ib].at(t_hi);
      integral += (t_hi - t) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
      t = t_hi;
    }
    if (a[ia].t1 <= t_hi) ++ia;
    if (b[ib].t1 <= t_hi) ++ib;
  }
  return std::sqrt(std::max(0.0, integral));
}

double euclidean_distance(const EuclideanPoint& a, const EuclideanPoint& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("Euclidean distance needs equal dimensions");
  return (a.coords() - b.coords()).norm();
}

namespace {

template <class T>
const T& as(const Object& obj, Metric metric) {
  const T* p = std::get_if<T>(&obj);
  if (p == nullptr) {
    throw InvalidArgument("metric '" + std::string(to_string(metric)) + "' does not apply to " +
                          std::string(to_string(kind_of(obj))) + " objects");
  }
  return *p;
}

void require_kind(const ObjectSet& objects, Metric metric) {
  if (objects.kind() && *objects.kind() != kind_for(metric)) {
    throw InvalidArgument("metric '" + std::string(to_string(metric)) + "' does not apply to " +
                          std::string(to_string(*objects.kind())) + " objects");
  }
}

}  // namespace

double distance(const Object& a, const Object& b, Metric metric) {
  switch (metric) {
    case Metric::Spd:
      return spd_distance(as<CorrelationMatrix>(a, metric), as<CorrelationMatrix>(b, metric));
    case Metric::Sphere:
      return sphere_distance(as<UnitVector>(a, metric), as<UnitVector>(b, metric));
    case Metric::Wasserstein:
      return wasserstein2_distance(as<Histogram>(a, metric), as<Histogram>(b, metric));
    case Metric::Euclidean:
      return euclidean_distance(as<EuclideanPoint>(a, metric), as<EuclideanPoint>(b, metric));
  }
  throw InvalidArgument("unknown metric");
}

DistanceMatrix distance_matrix(const ObjectSet& objects, Metric metric) {
  require_kind(objects, metric);
  g_distance_matrix_builds.fetch_add(1, std::memory_order_relaxed);
  const std::size_t n = objects.size();
  DistanceMatrix dm(n);

  if (metric == Metric::Spd) {
    std::vector<Eigen::MatrixXd> inv_sqrt(n);
    parallel_for(n, [&](std::size_t i) {
      inv_sqrt[i] = spd_inverse_sqrt(as<CorrelationMatrix>(objects[i], metric).entries());
    });
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        dm.set(i, j, spd_distance_from_inverse_sqrt(
                         inv_sqrt[i], as<CorrelationMatrix>(objects[j], metric).entries()));
      }
    });
    return dm;
  }

  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) dm.set(i, j, distance(objects[i], objects[j], metric));
  });
  return dm;
}

QueryDistances query_distances(const Object& x, const ObjectSet& sample, Metric metric) {
  require_kind(sample, metric);
  std::vector<double> d(sample.size());
  if (metric == Metric::Spd) {
    const Eigen::MatrixXd inv_sqrt = spd_inverse_sqrt(as<CorrelationMatrix>(x, metric).entries());
    for (std::size_t i = 0; i < sample.size(); ++i) {
      d[i] = spd_distance_from_inverse_sqrt(inv_sqrt,
                                            as<CorrelationMatrix>(sample[i], metric).entries());
    }
  } else {
    for (std::size_t i = 0; i < sample.size(); ++i) d[i] = distance(x, sample[i], metric);
  }
  return QueryDistances(std::move(d));
}

std::size_t distance_matrix_builds() {
  return g_distance_matrix_builds.load(std::memory_order_relaxed);
}

}  // namespace mdepth
