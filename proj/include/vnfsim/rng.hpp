#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace vnfsim {

/// Seeded random source used everywhere randomness is needed.
///
/// Only the raw mt19937_64 bit stream is consumed; the distributions are
/// derived here by hand because the std::*_distribution classes are
/// implementation-defined and would break byte-identical artifacts across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Exponential variate via inversion; `rate` must be positive.
  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::domain_error("exponential: rate must be positive");
    // -log(1 - u) with u in [0, 1) never evaluates log at zero.
    return -std::log1p(-uniform01()) / rate;
  }

  /// Uniform integer in [0, n) by rejection; `n` must be positive.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::domain_error("uniform_int: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace vnfsim
