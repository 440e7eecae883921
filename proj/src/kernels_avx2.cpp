#include "mdepth/kernels.hpp"
#include "mdepth/metric_core.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace mdepth::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline std::size_t popcount4(int mask) { return static_cast<std::size_t>(__builtin_popcount(mask)); }

}  // namespace

Oja3Sum oja3_row(double qi2, double qj2, double dij2, const double* qk2, const double* dik2,
                 const double* djk2, std::size_t count) {
  const double b12 = 0.5 * (qi2 + qj2 - dij2);
  const double lead = 5.0 * qi2 * qj2 - b12 * b12;
  const double max_ij = std::max({qi2, qj2, dij2});

  const __m256d v_half = _mm256_set1_pd(0.5);
  const __m256d v_two_b12 = _mm256_set1_pd(2.0 * b12);
  const __m256d v_qi2 = _mm256_set1_pd(qi2);
  const __m256d v_qj2 = _mm256_set1_pd(qj2);
  const __m256d v_lead = _mm256_set1_pd(lead);
  const __m256d v_max_ij = _mm256_set1_pd(max_ij);
  const __m256d v_one = _mm256_set1_pd(1.0);
  const __m256d v_neg_eps = _mm256_set1_pd(-1e-9);
  const __m256d v_zero = _mm256_setzero_pd();

  __m256d acc = _mm256_setzero_pd();
  std::size_t violations = 0;
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    const __m256d b33 = _mm256_loadu_pd(qk2 + t);
    const __m256d d13 = _mm256_loadu_pd(dik2 + t);
    const __m256d d23 = _mm256_loadu_pd(djk2 + t);
    const __m256d b13 = _mm256_mul_pd(v_half, _mm256_sub_pd(_mm256_add_pd(v_qi2, b33), d13));
    const __m256d b23 = _mm256_mul_pd(v_half, _mm256_sub_pd(_mm256_add_pd(v_qj2, b33), d23));
    // b13 (2 b12 b23 - b22 b13)
    const __m256d mid = _mm256_mul_pd(b13, _mm256_fnmadd_pd(v_qj2, b13, _mm256_mul_pd(v_two_b12, b23)));
    // b33 lead + mid - b11 b23^2
    const __m256d rad = _mm256_fnmadd_pd(_mm256_mul_pd(v_qi2, b23), b23, _mm256_fmadd_pd(b33, v_lead, mid));

    const int negative = _mm256_movemask_pd(_mm256_cmp_pd(rad, v_zero, _CMP_LT_OQ));
    if (negative) {
      __m256d m = _mm256_max_pd(_mm256_max_pd(v_max_ij, b33), _mm256_max_pd(d13, d23));
      const __m256d cube = _mm256_mul_pd(_mm256_mul_pd(m, m), m);
      const __m256d tol = _mm256_mul_pd(v_neg_eps, _mm256_max_pd(cube, v_one));
      violations += popcount4(_mm256_movemask_pd(_mm256_cmp_pd(rad, tol, _CMP_LT_OQ)));
    }
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(_mm256_max_pd(rad, v_zero)));
  }
  Oja3Sum out;
  out.sum = hsum(acc);
  out.violations = violations;
  if (t < count) {
    const Oja3Sum tail = scalar::oja3_row(qi2, qj2, dij2, qk2 + t, dik2 + t, djk2 + t, count - t);
    out.sum += tail.sum;
    out.violations += tail.violations;
  }
  return out;
}

double oja2_row(double qi2, const double* qj2, const double* dij2, std::size_t count) {
  const __m256d v_half = _mm256_set1_pd(0.5);
  const __m256d v_qi2 = _mm256_set1_pd(qi2);
  const __m256d v_floor = _mm256_set1_pd(kOja2NoiseFloor);
  __m256d acc = _mm256_setzero_pd();
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    const __m256d b22 = _mm256_loadu_pd(qj2 + t);
    const __m256d d = _mm256_loadu_pd(dij2 + t);
    const __m256d b12 = _mm256_mul_pd(v_half, _mm256_sub_pd(_mm256_add_pd(v_qi2, b22), d));
    const __m256d det = _mm256_fnmadd_pd(b12, b12, _mm256_mul_pd(v_qi2, b22));
    const __m256d scale = _mm256_add_pd(_mm256_add_pd(v_qi2, b22), d);
    const __m256d keep = _mm256_cmp_pd(det, _mm256_mul_pd(v_floor, _mm256_mul_pd(scale, scale)), _CMP_GT_OQ);
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(_mm256_and_pd(det, keep)));
  }
  double sum = hsum(acc);
  if (t < count) sum += scalar::oja2_row(qi2, qj2 + t, dij2 + t, count - t);
  return sum;
}

double spatial_row(double qi, const double* qj, const double* dij2, std::size_t count) {
  const __m256d v_qi = _mm256_set1_pd(qi);
  const __m256d v_qi2 = _mm256_set1_pd(qi * qi);
  const __m256d v_zero = _mm256_setzero_pd();
  const __m256d v_one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    const __m256d b = _mm256_loadu_pd(qj + t);
    const __m256d d = _mm256_loadu_pd(dij2 + t);
    const __m256d nonzero = _mm256_cmp_pd(b, v_zero, _CMP_NEQ_UQ);
    const __m256d num = _mm256_sub_pd(_mm256_fmadd_pd(b, b, v_qi2), d);
    // Zero lanes divide by 1 and are masked out afterwards.
    const __m256d den = _mm256_blendv_pd(v_one, _mm256_mul_pd(v_qi, b), nonzero);
    acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_div_pd(num, den), nonzero));
  }
  double sum = hsum(acc);
  if (t < count) sum += scalar::spatial_row(qi, qj + t, dij2 + t, count - t);
  return sum;
}

std::size_t lens_row(double qi, const double* qj, const double* dij, std::size_t count) {
  const __m256d v_qi = _mm256_set1_pd(qi);
  std::size_t hits = 0;
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    const __m256d far = _mm256_max_pd(v_qi, _mm256_loadu_pd(qj + t));
    const __m256d gt = _mm256_cmp_pd(_mm256_loadu_pd(dij + t), far, _CMP_GT_OQ);
    hits += popcount4(_mm256_movemask_pd(gt));
  }
  if (t < count) hits += scalar::lens_row(qi, qj + t, dij + t, count - t);
  return hits;
}

std::size_t less_equal_count(const double* a, const double* b, std::size_t count) {
  std::size_t hits = 0;
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    const __m256d le = _mm256_cmp_pd(_mm256_loadu_pd(a + t), _mm256_loadu_pd(b + t), _CMP_LE_OQ);
    hits += popcount4(_mm256_movemask_pd(le));
  }
  if (t < count) hits += scalar::less_equal_count(a + t, b + t, count - t);
  return hits;
}

}  // namespace mdepth::kernels::avx2
