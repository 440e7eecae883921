#include "mdepth/kernels.hpp"

#include "mdepth/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace mdepth::kernels {

namespace {

constexpr KernelTable kScalar{scalar::oja3_row, scalar::oja2_row, scalar::spatial_row,
                              scalar::lens_row, scalar::less_equal_count};
#if defined(MDEPTH_HAVE_AVX2)
constexpr KernelTable kAvx2{avx2::oja3_row, avx2::oja2_row, avx2::spatial_row, avx2::lens_row,
                            avx2::less_equal_count};
#endif

Isa initial_isa() {
  const char* env = std::getenv("MDEPTH_ISA");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return detected_isa();
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(MDEPTH_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() { return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw InvalidArgument("kernel variant '" + std::string(isa_name(isa)) +
                          "' is not available on this CPU/build");
  }
  active_slot().store(isa, std::memory_order_relaxed);
}

const KernelTable& table(Isa isa) {
#if defined(MDEPTH_HAVE_AVX2)
  if (isa == Isa::Avx2) return kAvx2;
#endif
  (void)isa;
  return kScalar;
}

}  // namespace mdepth::kernels
