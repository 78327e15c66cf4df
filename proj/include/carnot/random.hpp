#pragma once

// Seeded sampling helpers. Every draw is derived from explicit 64-bit state so
// the same seed gives the same stream on every platform.

#include "carnot/rational.hpp"

#include <cstdint>
#include <random>

namespace carnot {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  /// Independent stream for sample `index`; prefixes of a budget stay fixed as it grows.
  static Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(splitmix64(seed) ^ splitmix64(~index)); }

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
  /// p/q with |p| <= max_num and 1 <= q <= max_den.
  Rational rational(long max_num, long max_den) {
    long p = static_cast<long>(below(static_cast<std::uint64_t>(2 * max_num + 1))) - max_num;
    long q = static_cast<long>(below(static_cast<std::uint64_t>(max_den))) + 1;
    Rational r(p, q);
    r.canonicalize();
    return r;
  }
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace carnot
