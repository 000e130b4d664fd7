#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace eventcure {

using Rng = std::mt19937_64;

/// Derives an independent seed for a named sub-stream ("train", "synth",
/// "eval", ...) so every consumer of randomness is keyed off one root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double normal(Rng& rng, double stddev) {
  if (stddev == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, stddev)(rng);
}

}  // namespace eventcure
