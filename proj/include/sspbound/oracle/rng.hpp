#pragma once

// Counter-based randomness: every draw is a pure function of
// (seed, trial, step, draw), so a trial's stream does not depend on which
// thread runs it or in what order.

#include <cstdint>

namespace sspbound::oracle {

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t trial, std::uint64_t step, std::uint64_t draw) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ trial);
  h = mix64(h ^ step);
  return mix64(h ^ draw);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t step, std::uint64_t draw) {
  return static_cast<double>(counter_bits(seed, trial, step, draw) >> 11) * 0x1.0p-53;
}

}  // namespace sspbound::oracle
