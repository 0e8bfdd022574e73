// Seeded randomness shared by every module. All draws flow through one named
// generator with hand-rolled distributions, so runs reproduce exactly for a
// given seed within a build (std:: distributions are implementation-defined).
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spinlab {

inline constexpr const char* kGeneratorName = "mt19937_64/u53";

// SplitMix64 output function, used for seed mixing and deterministic vectors.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stable mix of a base seed and a cell index (replica id, graph seed, ...).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t s = base + 0x9e3779b97f4a7c15ull * (salt + 1);
  std::uint64_t z = splitmix64(s);
  return z ? z : 0x1234567887654321ull;  // mt19937_64 dislikes seed 0 less, but keep nonzero anyway
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t u64() { return gen_(); }

  // Uniform on the dyadic 2^53 grid in [0,1). Both endpoints of update
  // intervals are representable, which the closed-threshold convention needs.
  double u53() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }

  // Grid midpoints: strictly inside (0,1), keeps -log finite and positive.
  double u53_open() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
  }

  double exp_variate(double rate) { return -std::log(u53_open()) / rate; }

  // Unbiased integer in [0,n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t lim = (-n) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t x = gen_();
      if (x >= lim) return x % n;
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace spinlab
