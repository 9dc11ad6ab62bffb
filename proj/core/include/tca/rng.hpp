#pragma once

#include <cstdint>

namespace tca {

// Deterministic 64-bit generator (splitmix64). The whole state is one
// 64-bit word advanced by a fixed odd constant, so identical seeds give
// identical integer streams on every platform. Floating-point draws go
// through explicit conversions below instead of std::*_distribution,
// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Box-Muller; consumes two uniforms per draw, no cached spare so the
  // state stays a single word.
  double normal(double mu, double sigma);

  // Uniform integer in [0, n). n must be positive; bias is negligible for
  // the desk-scale n used here.
  int below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

}  // namespace tca
