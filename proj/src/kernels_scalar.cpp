#include "mdepth/kernels.hpp"
#include "mdepth/metric_core.hpp"

#include <algorithm>
#include <cmath>

namespace mdepth::kernels::scalar {

Oja3Sum oja3_row(double qi2, double qj2, double dij2, const double* qk2, const double* dik2,
                 const double* djk2, std::size_t count) {
  // radicand = det B3 + 4 b11 b22 b33
  //          = b33 (5 b11 b22 - b12^2) + b13 (2 b12 b23 - b22 b13) - b11 b23^2
  const double b12 = 0.5 * (qi2 + qj2 - dij2);
  const double lead = 5.0 * qi2 * qj2 - b12 * b12;
  const double max_ij = std::max({qi2, qj2, dij2});
  Oja3Sum out;
  for (std::size_t t = 0; t < count; ++t) {
    const double b33 = qk2[t];
    const double b13 = 0.5 * (qi2 + b33 - dik2[t]);
    const double b23 = 0.5 * (qj2 + b33 - djk2[t]);
    const double rad = b33 * lead + b13 * (2.0 * b12 * b23 - qj2 * b13) - qi2 * b23 * b23;
    if (rad > 0.0) {
      out.sum += std::sqrt(rad);
    } else if (rad < 0.0) {
      const double m = std::max({max_ij, b33, dik2[t], djk2[t]});
      if (rad < -radicand_tolerance(m)) ++out.violations;
    }
  }
  return out;
}

double oja2_row(double qi2, const double* qj2, const double* dij2, std::size_t count) {
  double sum = 0.0;
  for (std::size_t t = 0; t < count; ++t) {
    const double b12 = 0.5 * (qi2 + qj2[t] - dij2[t]);
    const double det = qi2 * qj2[t] - b12 * b12;
    const double scale = qi2 + qj2[t] + dij2[t];
    if (det > kOja2NoiseFloor * scale * scale) sum += std::sqrt(det);
  }
  return sum;
}

double spatial_row(double qi, const double* qj, const double* dij2, std::size_t count) {
  const double qi2 = qi * qi;
  double sum = 0.0;
  for (std::size_t t = 0; t < count; ++t) {
    if (qj[t] == 0.0) continue;
    sum += (qi2 + qj[t] * qj[t] - dij2[t]) / (qi * qj[t]);
  }
  return sum;
}

std::size_t lens_row(double qi, const double* qj, const double* dij, std::size_t count) {
  std::size_t hits = 0;
  for (std::size_t t = 0; t < count; ++t) {
    if (dij[t] > std::max(qi, qj[t])) ++hits;
  }
  return hits;
}

std::size_t less_equal_count(const double* a, const double* b, std::size_t count) {
  std::size_t hits = 0;
  for (std::size_t t = 0; t < count; ++t) {
    if (a[t] <= b[t]) ++hits;
  }
  return hits;
}

}  // namespace mdepth::kernels::scalar
