#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "uwb1a/types.hpp"

namespace uwb1a {

// Deterministic Gaussian source. Box-Muller on top of mt19937_64 so the
// draw sequence is identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double phi = kTwoPi * uniform();
    spare_ = mag * std::sin(phi);
    has_spare_ = true;
    return mag * std::cos(phi);
  }

  double gaussian(double mean, double std) { return mean + std * gaussian(); }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace uwb1a
