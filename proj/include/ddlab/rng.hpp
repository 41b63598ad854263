#pragma once

#include <cmath>
#include <cstdint>

// Deterministic random streams. Everything that consumes randomness in this
// project goes through Rng (xoshiro256++) seeded via derive_seed, so results
// are reproducible bit-for-bit from the seeds recorded in configs/outputs.

namespace ddlab {

// SplitMix64 finalizer (Steele, Lea, Flood 2014): the avalanche step only.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Documented seed-derivation hash:
//   derive_seed(s, a, b) = mix64(mix64(mix64(s + GAMMA) ^ a) ^ b),
// GAMMA = 0x9e3779b97f4a7c15. Substreams (per replicate, per complexity,
// per purpose) are derived with distinct (a, b) pairs and never reuse the
// master seed directly.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(mix64(master + 0x9e3779b97f4a7c15ULL) ^ a) ^ b);
}

// xoshiro256++ (Blackman & Vigna 2019), state expanded from the seed with
// SplitMix64. Fixed here (rather than std::mt19937) so streams are stable
// across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& w : s_) {
      z += 0x9e3779b97f4a7c15ULL;
      w = mix64(z);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));  // log(1-u1), never log(0)
    const double a = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace ddlab
