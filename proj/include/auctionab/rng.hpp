#pragma once

#include <cstdint>
#include <random>

namespace auctionab {

// All Monte Carlo code draws from std::mt19937_64. The engine's output
// sequence is fixed by the C++ standard, and the two helpers below avoid the
// implementation-defined std::*_distribution classes, so a given seed yields
// the same stream on every conforming toolchain.
using Engine = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of replicate `index` under master seed `seed`: mix64(seed ^ index).
// Replicates are independent of execution order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ index);
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t bound) {
  std::uint64_t x = eng();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = eng();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace auctionab
