#pragma once

// Inner loops of the sample depths. Each kernel has a scalar reference
// version and, on x86-64, an AVX2 version; the dispatching entry points pick
// one at runtime. Counting kernels agree exactly across variants, summing
// kernels agree up to floating-point reassociation.

#include <cstddef>
#include <string_view>

namespace mdepth::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best variant supported by this CPU and build.
Isa detected_isa();

/// Variant used by the dispatching kernels. Defaults to detected_isa(), or
/// Scalar if the MDEPTH_ISA environment variable is "scalar".
Isa active_isa();

/// Throws InvalidArgument if `isa` is not available.
void set_active_isa(Isa isa);

bool isa_available(Isa isa);

struct Oja3Sum {
  double sum = 0.0;
  std::size_t violations = 0;  // radicands below -radicand_tolerance
};

// Oja kernel for the triples (i, j, k_t), t < count, with the query's squared
// distances qi2, qj2, qk2[t] and squared pairwise distances dij2, dik2[t],
// djk2[t]. Negative radicands within tolerance contribute 0.
using Oja3RowFn = Oja3Sum (*)(double qi2, double qj2, double dij2, const double* qk2,
                              const double* dik2, const double* djk2, std::size_t count);

// Determinants of B2 at or below this multiple of (qi2 + qj2 + dij2)^2 are
// rounding noise from collinear triples and count as 0.
inline constexpr double kOja2NoiseFloor = 1e-13;

// sum_t sqrt(det B2(i, j_t)) over determinants above the noise floor.
using Oja2RowFn = double (*)(double qi2, const double* qj2, const double* dij2,
                             std::size_t count);

// sum_t 1(qj[t] != 0) (qi^2 + qj[t]^2 - dij2[t]) / (qi qj[t]); requires qi != 0.
using SpatialRowFn = double (*)(double qi, const double* qj, const double* dij2,
                                std::size_t count);

// #{t : dij[t] > max(qi, qj[t])}.
using LensRowFn = std::size_t (*)(double qi, const double* qj, const double* dij,
                                  std::size_t count);

// #{t : a[t] <= b[t]}.
using LessEqualCountFn = std::size_t (*)(const double* a, const double* b, std::size_t count);

struct KernelTable {
  Oja3RowFn oja3_row;
  Oja2RowFn oja2_row;
  SpatialRowFn spatial_row;
  LensRowFn lens_row;
  LessEqualCountFn less_equal_count;
};

const KernelTable& table(Isa isa);
inline const KernelTable& active() { return table(active_isa()); }

namespace scalar {
Oja3Sum oja3_row(double qi2, double qj2, double dij2, const double* qk2, const double* dik2,
                 const double* djk2, std::size_t count);
double oja2_row(double qi2, const double* qj2, const double* dij2, std::size_t count);
double spatial_row(double qi, const double* qj, const double* dij2, std::size_t count);
std::size_t lens_row(double qi, const double* qj, const double* dij, std::size_t count);
std::size_t less_equal_count(const double* a, const double* b, std::size_t count);
}  // namespace scalar

#if defined(MDEPTH_HAVE_AVX2)
namespace avx2 {
Oja3Sum oja3_row(double qi2, double qj2, double dij2, const double* qk2, const double* dik2,
                 const double* djk2, std::size_t count);
double oja2_row(double qi2, const double* qj2, const double* dij2, std::size_t count);
double spatial_row(double qi, const double* qj, const double* dij2, std::size_t count);
std::size_t lens_row(double qi, const double* qj, const double* dij, std::size_t count);
std::size_t less_equal_count(const double* a, const double* b, std::size_t count);
}  // namespace avx2
#endif

}  // namespace mdepth::kernels
