#pragma once

#include <cstddef>
#include <cstdint>

namespace uwb1a {

struct SpeedVariance {
  double var_v = 0.0;  // first-order variance of the speed estimate [m^2/s^2]
  double denom = 0.0;  // conditioning term D = r2^2 + r0^2 - 2 r1^2 [m^2]
};

/// First-order propagated variance of the uniform-interval speed solve.
///
/// With v = sqrt(D / (2 dt^2)), D = r2^2 + r0^2 - 2 r1^2, and independent
/// range noise of std sigma_r on each of r0, r1, r2:
///
///   var_v = (r0^2 + r2^2 + 4 r1^2) / (2 D) * (sigma_r / dt)^2
///         = (1/2 + 3 r1^2 / D) * (sigma_r / dt)^2.
///
/// The noise scale enters as sigma_r / dt (a speed), and the variance blows
/// up as D -> 0 (three similar ranges) and grows with r1 at fixed D. The
/// Monte-Carlo harness below validates this closed form.
SpeedVariance speed_variance_analytic(double r0, double r1, double r2, double dt,
                                      double sigma_r);

struct MonteCarloSpeedStd {
  double std_v = 0.0;            // sample std of the successful re-solves
  double discard_fraction = 0.0; // fraction of trials with no real solution
  std::size_t n_success = 0;
};

/// Monte-Carlo arbiter for the analytic propagation: perturbs each range
/// with N(0, sigma_r^2), re-solves the uniform-interval speed per trial,
/// discards failed solves, and returns the sample std of the survivors.
/// Deterministic for a fixed seed.
MonteCarloSpeedStd speed_std_monte_carlo(double r0, double r1, double r2, double dt,
                                         double sigma_r, std::size_t n_trials,
                                         std::uint64_t seed);

}  // namespace uwb1a
