#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lanegeo {

/// Stable seed derivation so each stage draws from its own stream.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a,
                                 std::uint64_t b) {
  return derive_seed(derive_seed(root, a), b);
}

/// [0, 1). Hand-rolled so output does not depend on the standard library's
/// distribution implementation.
inline double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_double(rng);
}

/// Inclusive integer range.
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo,
                                std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(rng() % span);
}

/// Box-Muller, two draws per sample, no state.
inline double normal_sample(std::mt19937_64& rng, double sigma) {
  const double u1 = uniform_double(rng);
  const double u2 = uniform_double(rng);
  const double r = std::sqrt(-2.0 * std::log(u1 > 0.0 ? u1 : 0x1.0p-53));
  return sigma * r * std::cos(2.0 * 3.141592653589793 * u2);
}

}  // namespace lanegeo
