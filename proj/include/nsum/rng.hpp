#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nsum {

// Used to scramble user seeds before feeding the engine, so that nearby
// seeds (seed, seed+1, ...) give decorrelated streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded random stream with portable variate generation. mt19937_64 output
// is pinned by the C++ standard, and all distribution algorithms live here,
// so a fixed seed reproduces the same stream on any compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound >= 1. Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Number of failures before the next success in a Bernoulli(p) process.
  std::uint64_t geometric(double p) {
    double u = uniform01();
    double g = std::floor(std::log1p(-u) / std::log1p(-p));
    if (g >= 9.2e18) return UINT64_MAX;
    return static_cast<std::uint64_t>(g);
  }

  // Exact Binomial(n, p) draw. For small n a Bernoulli loop, otherwise
  // success counting with geometric skips (O(np) expected work).
  std::uint64_t binomial(std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    if (n <= 64) {
      std::uint64_t k = 0;
      for (std::uint64_t i = 0; i < n; ++i) k += bernoulli(p);
      return k;
    }
    std::uint64_t count = 0;
    std::uint64_t pos = 0;
    for (;;) {
      std::uint64_t gap = geometric(p);
      if (gap >= n - pos) break;
      pos += gap + 1;
      ++count;
      if (pos >= n) break;
    }
    return count;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nsum
