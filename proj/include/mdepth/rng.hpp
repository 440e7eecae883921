#pragma once

#include <cstdint>
#include <random>

namespace mdepth {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate child seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for replicate/stream `index` of a run seeded with `seed`. Depends only
/// on the pair, so results never depend on execution order.
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ mix64(index);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

}  // namespace mdepth
