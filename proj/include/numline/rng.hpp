#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace numline {

// Deterministic RNG facade. Every variate is derived from the raw mt19937_64
// stream with fixed arithmetic; std::*_distribution are implementation-defined
// and would break seed reproducibility across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  /// Uniform in the open interval (0, 1); safe to feed to quantile functions.
  double uniform01_open() {
    return (static_cast<double>(u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via the inverse CDF.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Uniform integer in [0, n), unbiased (rejection sampling). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

/// Stable sub-seed derivation for independent streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace numline
