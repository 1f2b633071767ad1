#pragma once

#include <cstdint>

namespace shiftlab {

// Counter-based pseudorandom function (SplitMix64 finalizer). Stateless:
// every draw is a pure function of (seed, counter), so sampled configurations
// are reproducible and safe to query from several threads at once.
inline std::uint64_t prf_mix(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform draw in [0, 1) with 53 random bits.
inline double prf_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(prf_mix(seed, counter) >> 11) * 0x1.0p-53;
}

}  // namespace shiftlab
