#pragma once

#include <cmath>
#include <cstdint>

// Counter-based randomness: every draw is a pure function of
// (seed, domain, a, b, draw). Nothing is stateful, so parallel schedules
// cannot reorder streams and any draw can be re-derived independently.

namespace dspider::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// data generation
inline constexpr std::uint64_t kDomFeature = 1;
inline constexpr std::uint64_t kDomPlanted = 2;
inline constexpr std::uint64_t kDomLabelNoise = 3;
inline constexpr std::uint64_t kDomPartition = 4;
inline constexpr std::uint64_t kDomBatch = 5;
inline constexpr std::uint64_t kDomProbe = 6;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t bits(std::uint64_t seed, std::uint64_t domain,
                          std::uint64_t a, std::uint64_t b,
                          std::uint64_t draw) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h + domain * kGolden);
  h = mix64(h + a * kGolden);
  h = mix64(h + b * kGolden);
  h = mix64(h + draw * kGolden);
  return h;
}

// [0, 1) with 53 random bits
inline double uniform01(std::uint64_t seed, std::uint64_t domain,
                        std::uint64_t a, std::uint64_t b,
                        std::uint64_t draw) {
  return static_cast<double>(bits(seed, domain, a, b, draw) >> 11) * 0x1.0p-53;
}

// uniform integer in [0, n) by 128-bit multiply-shift (bias ~ n / 2^64)
inline std::uint64_t bounded(std::uint64_t raw, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(raw) * n) >> 64);
}

// standard normal via Box-Muller; consumes draws 2*pair and 2*pair+1
inline double normal(std::uint64_t seed, std::uint64_t domain, std::uint64_t a,
                     std::uint64_t b, std::uint64_t pair) {
  const double u1 = uniform01(seed, domain, a, b, 2 * pair);
  const double u2 = uniform01(seed, domain, a, b, 2 * pair + 1);
  const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 in [0,1) -> 1-u1 in (0,1]
  return r * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace dspider::rng
