#include "mdepth/deepest.hpp"

#include "mdepth/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>

namespace mdepth {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::SimplexBox ? "simplex" : "lbfgs";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "simplex") return OptimizerKind::SimplexBox;
  if (name == "lbfgs") return OptimizerKind::QuasiNewtonBox;
  throw InvalidArgument("unknown optimizer '" + std::string(name) + "' (expected simplex|lbfgs)");
}

namespace {

using Eigen::VectorXd;

struct BudgetExhausted {};

// Counts evaluations, enforces the budget and keeps the best point seen.
// Internally everything is minimized: cost = -objective.
class Tracker {
 public:
  Tracker(const Objective& f, const VectorXd& lower, const VectorXd& upper, std::size_t budget)
      : f_(f), lower_(lower), upper_(upper), budget_(budget) {}

  double cost(const VectorXd& x) {
    if (evaluations_ >= budget_) throw BudgetExhausted{};
    const VectorXd clamped = x.cwiseMax(lower_).cwiseMin(upper_);
    const double value = f_(clamped);
    ++evaluations_;
    const double c = std::isfinite(value) ? -value : std::numeric_limits<double>::infinity();
    if (c < best_cost_) {
      best_cost_ = c;
      best_ = clamped;
    }
    return c;
  }

  std::size_t evaluations() const { return evaluations_; }
  std::size_t remaining() const { return budget_ - evaluations_; }
  double best_cost() const { return best_cost_; }
  const VectorXd& best() const { return best_; }

 private:
  const Objective& f_;
  const VectorXd& lower_;
  const VectorXd& upper_;
  std::size_t budget_;
  std::size_t evaluations_ = 0;
  double best_cost_ = std::numeric_limits<double>::infinity();
  VectorXd best_;
};

bool converged(double lo, double hi, double ftol) {
  if (!std::isfinite(hi)) return false;
  return 2.0 * std::abs(hi - lo) <= ftol * (std::abs(hi) + std::abs(lo)) + 1e-20;
}

// x = mid + half * (2/pi) atan(y)
class BoxTransform {
 public:
  BoxTransform(const VectorXd& lower, const VectorXd& upper)
      : mid_(0.5 * (lower + upper)), half_(0.5 * (upper - lower)) {}

  VectorXd to_box(const VectorXd& y) const {
    VectorXd x(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      x(i) = mid_(i) + half_(i) * (2.0 / std::numbers::pi) * std::atan(y(i));
    }
    return x;
  }

  VectorXd from_box(const VectorXd& x) const {
    constexpr double kEdge = 1.0 - 1e-9;
    VectorXd y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double ratio = std::clamp((x(i) - mid_(i)) / half_(i), -kEdge, kEdge);
      y(i) = std::tan(ratio * std::numbers::pi / 2.0);
    }
    return y;
  }

 private:
  VectorXd mid_;
  VectorXd half_;
};

void nelder_mead_pass(Tracker& tracker, const BoxTransform& tr, const VectorXd& start_x,
                      const VectorXd& lower, const VectorXd& upper, double ftol) {
  const auto dim = start_x.size();
  const VectorXd y0 = tr.from_box(start_x);
  std::vector<VectorXd> simplex{y0};
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double step = 0.1 * (upper(i) - lower(i));
    VectorXd x = start_x;
    x(i) += (x(i) + step <= upper(i)) ? step : -step;
    simplex.push_back(tr.from_box(x));
  }
  auto cost = [&](const VectorXd& y) { return tracker.cost(tr.to_box(y)); };
  std::vector<double> values;
  for (const auto& y : simplex) values.push_back(cost(y));

  std::vector<std::size_t> order(simplex.size());
  for (;;) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    if (converged(values[best], values[worst], ftol)) return;

    double diameter = 0.0;
    for (const auto& y : simplex) {
      diameter = std::max(diameter, (tr.to_box(y) - tr.to_box(simplex[best])).cwiseAbs().maxCoeff());
    }
    if (diameter <= 1e-14) return;

    VectorXd centroid = VectorXd::Zero(dim);
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k != worst) centroid += simplex[k];
    }
    centroid /= static_cast<double>(dim);

    const VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double fr = cost(reflected);
    if (fr < values[best]) {
      const VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = cost(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const VectorXd contracted = outside ? VectorXd(centroid + 0.5 * (reflected - centroid))
                                        : VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = cost(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k == best) continue;
      simplex[k] = simplex[best] + 0.5 * (simplex[k] - simplex[best]);
      values[k] = cost(simplex[k]);
    }
  }
}

void simplex_box(Tracker& tracker, const VectorXd& start, const VectorXd& lower,
                 const VectorXd& upper, double ftol) {
  const BoxTransform tr(lower, upper);
  VectorXd from = start;
  for (int pass = 0; pass < 4; ++pass) {
    const double before = tracker.best_cost();
    nelder_mead_pass(tracker, tr, from, lower, upper, ftol);
    if (pass > 0 && converged(tracker.best_cost(), before, ftol)) return;
    from = tracker.best();
  }
}

VectorXd project(const VectorXd& x, const VectorXd& lower, const VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

VectorXd gradient(Tracker& tracker, const VectorXd& x, double fx, const VectorXd& lower,
                  const VectorXd& upper, double rel_step) {
  VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    VectorXd xp = x;
    VectorXd xm = x;
    if (x(i) + h <= upper(i) && x(i) - h >= lower(i)) {
      xp(i) += h;
      xm(i) -= h;
      g(i) = (tracker.cost(xp) - tracker.cost(xm)) / (2.0 * h);
    } else if (x(i) + h <= upper(i)) {
      xp(i) += h;
      g(i) = (tracker.cost(xp) - fx) / h;
    } else {
      xm(i) -= h;
      g(i) = (fx - tracker.cost(xm)) / h;
    }
    if (!std::isfinite(g(i))) g(i) = 0.0;
  }
  return g;
}

void quasi_newton_box(Tracker& tracker, const VectorXd& start, const VectorXd& lower,
                      const VectorXd& upper, const OptimizerConfig& cfg) {
  const auto dim = start.size();
  const double width = (upper - lower).maxCoeff();
  VectorXd x = start;
  double fx = tracker.cost(x);
  std::deque<std::pair<VectorXd, VectorXd>> history;

  for (bool first = true;; first = false) {
    VectorXd g = gradient(tracker, x, fx, lower, upper, cfg.fd_step);

    std::vector<bool> free(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
      const bool at_lower = x(i) <= lower(i) && g(i) > 0.0;
      const bool at_upper = x(i) >= upper(i) && g(i) < 0.0;
      free[static_cast<std::size_t>(i)] = !(at_lower || at_upper);
    }
    auto mask = [&](VectorXd v) {
      for (Eigen::Index i = 0; i < dim; ++i)
        if (!free[static_cast<std::size_t>(i)]) v(i) = 0.0;
      return v;
    };
    const VectorXd pg = mask(g);
    if (pg.lpNorm<Eigen::Infinity>() <= 1e-12) return;

    // Two-loop recursion on the free subspace.
    VectorXd d = pg;
    std::vector<double> alpha(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      const VectorXd s = mask(history[k].first);
      const VectorXd y = mask(history[k].second);
      const double sy = s.dot(y);
      if (sy <= 1e-300) continue;
      alpha[k] = s.dot(d) / sy;
      d -= alpha[k] * y;
    }
    if (!history.empty()) {
      const VectorXd s = mask(history.back().first);
      const VectorXd y = mask(history.back().second);
      const double yy = y.dot(y);
      if (yy > 0.0 && s.dot(y) > 0.0) d *= s.dot(y) / yy;
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const VectorXd s = mask(history[k].first);
      const VectorXd y = mask(history[k].second);
      const double sy = s.dot(y);
      if (sy <= 1e-300) continue;
      const double beta = y.dot(d) / sy;
      d += (alpha[k] - beta) * s;
    }
    d = -mask(d);
    if (d.dot(pg) >= 0.0) d = -pg;

    double step = 1.0;
    const double dmax = d.lpNorm<Eigen::Infinity>();
    if ((first || history.empty()) && dmax > 0.0) step = std::min(1.0, width / dmax);

    VectorXd x_new;
    double f_new = fx;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      x_new = project(x + step * d, lower, upper);
      f_new = tracker.cost(x_new);
      if (f_new <= fx + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return;

    const VectorXd s = x_new - x;
    const double f_old = fx;
    x = x_new;
    fx = f_new;
    if (std::abs(f_old - fx) <= cfg.function_tolerance * std::max({std::abs(f_old), std::abs(fx), 1.0})) {
      return;
    }
    const VectorXd g_new = gradient(tracker, x, fx, lower, upper, cfg.fd_step);
    const VectorXd y = g_new - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      history.emplace_back(s, y);
      if (history.size() > cfg.memory) history.pop_front();
    }
  }
}

}  // namespace

OptimizeResult optimize_box(const Objective& objective, const Eigen::VectorXd& start,
                            const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                            const OptimizerConfig& cfg) {
  const auto dim = start.size();
  if (dim == 0) throw InvalidArgument("optimize_box: empty start vector");
  if (lower.size() != dim || upper.size() != dim) {
    throw InvalidArgument("optimize_box: bound dimensions do not match the start");
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!(lower(i) < upper(i))) throw InvalidArgument("optimize_box: lower must be below upper");
    if (!(start(i) >= lower(i) && start(i) <= upper(i))) {
      throw InvalidArgument("optimize_box: start lies outside the box");
    }
  }
  if (!(cfg.function_tolerance >= 0.0)) throw InvalidArgument("function tolerance must be >= 0");
  if (!(cfg.fd_step > 0.0)) throw InvalidArgument("finite-difference step must be positive");

  const std::size_t budget =
      cfg.max_evaluations > 0 ? cfg.max_evaluations : 500 * static_cast<std::size_t>(dim);
  Tracker tracker(objective, lower, upper, std::max<std::size_t>(budget, 1));
  if (!std::isfinite(tracker.cost(start))) {
    throw NumericError("optimize_box: objective is not finite at the start");
  }
  try {
    if (cfg.algorithm == OptimizerKind::SimplexBox) {
      simplex_box(tracker, start, lower, upper, cfg.function_tolerance);
    } else {
      quasi_newton_box(tracker, start, lower, upper, cfg);
    }
  } catch (const BudgetExhausted&) {
  }
  return {tracker.best(), -tracker.best_cost(), tracker.evaluations()};
}

}  // namespace mdepth
