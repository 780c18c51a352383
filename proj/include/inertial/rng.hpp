#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace inertial {

// Deterministic draws on top of mt19937_64. The distributions are inlined
// here instead of using <random>'s, whose output is implementation-defined;
// identical seeds must reproduce identical games on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Exp(1) via inverse CDF; unit() < 1 keeps the log argument positive.
  double exponential() { return -std::log1p(-unit()); }

  // Integer in [0, bound) by rejection, bias-free.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 mix; used to derive independent sub-seeds from a base seed.
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform point on {x >= 0, sum x = mass} via normalized exponential
// spacings.
inline std::vector<double> sample_simplex(Rng& rng, int n, double mass) {
  std::vector<double> x(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& v : x) {
    v = rng.exponential();
    total += v;
  }
  if (total <= 0.0) {  // all draws zero; vanishing probability but defined
    const double even = mass / n;
    for (auto& v : x) v = even;
    return x;
  }
  for (auto& v : x) v = mass * (v / total);
  return x;
}

}  // namespace inertial
