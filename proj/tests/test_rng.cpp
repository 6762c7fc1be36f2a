#include <cmath>
#include <vector>

#include "doctest.h"
#include "nsum/rng.hpp"

using namespace nsum;

TEST_CASE("rng streams are deterministic and seed-sensitive") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t x = a.next_u64();
    all_equal = all_equal && x == b.next_u64();
    any_diff = any_diff || x != c.next_u64();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform01 stays in [0,1)") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("below respects the bound and is roughly uniform") {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    std::uint64_t v = rng.below(7);
    REQUIRE(v < 7);
    counts[v]++;
  }
  // each bin ~10000, sd ~ sqrt(10000*6/7) ~ 93
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("binomial edge cases") {
  Rng rng(3);
  CHECK(rng.binomial(100, 0.0) == 0);
  CHECK(rng.binomial(100, 1.0) == 100);
  CHECK(rng.binomial(0, 0.5) == 0);
}

TEST_CASE("binomial moments match for both sampling paths") {
  // small-n Bernoulli loop and large-n geometric skipping
  struct Case {
    std::uint64_t n;
    double p;
  };
  for (Case c : {Case{10, 0.3}, Case{2000, 0.01}, Case{100, 0.9}}) {
    Rng rng(1000 + static_cast<std::uint64_t>(c.n));
    const int reps = 40000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < reps; ++i) {
      double v = static_cast<double>(rng.binomial(c.n, c.p));
      sum += v;
      sumsq += v * v;
    }
    double mean = sum / reps;
    double var = sumsq / reps - mean * mean;
    double m = static_cast<double>(c.n) * c.p;
    double v = m * (1 - c.p);
    CHECK(std::abs(mean - m) < 4.0 * std::sqrt(v / reps));
    CHECK(std::abs(var - v) < 0.05 * v + 4.0 * v * std::sqrt(2.0 / reps));
  }
}
