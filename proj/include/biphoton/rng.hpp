#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "biphoton/errors.hpp"

// Seeded RNG stream with an exact Poisson sampler. The sampler is written
// out here (rather than using std::poisson_distribution, whose variate
// sequence is implementation-defined) so that a given seed yields the same
// byte-identical artifacts on every platform.

namespace biphoton {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) built from the top 53 bits of the stream.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Exact Poisson variate: Knuth multiplication for small means, the
  /// transformed-rejection (PTRS) scheme for large ones.
  long long poisson(double mean) {
    if (mean < 0.0) throw InvalidInputError("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_knuth(mean);
    return poisson_ptrs(mean);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  long long poisson_knuth(double mean) {
    const double limit = std::exp(-mean);
    long long k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  long long poisson_ptrs(double mean) {
    const double slam = std::sqrt(mean);
    const double llam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return (long long)kf;
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          kf * llam - mean - std::lgamma(kf + 1.0))
        return (long long)kf;
    }
  }

  std::mt19937_64 engine_;
};

}  // namespace biphoton
