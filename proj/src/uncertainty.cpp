#include "uwb1a/uncertainty.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "uwb1a/errors.hpp"
#include "uwb1a/random.hpp"
#include "uwb1a/speed_estimator.hpp"

namespace uwb1a {

SpeedVariance speed_variance_analytic(double r0, double r1, double r2, double dt,
                                      double sigma_r) {
  if (!(dt > 0.0)) throw std::invalid_argument("speed_variance_analytic: dt must be > 0");
  if (sigma_r < 0.0) throw std::invalid_argument("speed_variance_analytic: sigma_r < 0");
  const double d = (r2 - r1) * (r2 + r1) - (r1 - r0) * (r1 + r0);
  if (!(d > 0.0)) {
    throw ConditioningError("speed_variance_analytic: non-positive denominator", d);
  }
  const double s = sigma_r / dt;
  SpeedVariance out;
  out.denom = d;
  out.var_v = (r0 * r0 + r2 * r2 + 4.0 * r1 * r1) / (2.0 * d) * s * s;
  return out;
}

MonteCarloSpeedStd speed_std_monte_carlo(double r0, double r1, double r2, double dt,
                                         double sigma_r, std::size_t n_trials,
                                         std::uint64_t seed) {
  if (n_trials < 10000) {
    throw std::invalid_argument("speed_std_monte_carlo: need at least 1e4 trials");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("speed_std_monte_carlo: dt must be > 0");
  if (sigma_r < 0.0) throw std::invalid_argument("speed_std_monte_carlo: sigma_r < 0");

  Rng rng(seed);
  std::vector<double> speeds;
  speeds.reserve(n_trials);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < n_trials; ++i) {
    const double p0 = r0 + rng.gaussian(0.0, sigma_r);
    const double p1 = r1 + rng.gaussian(0.0, sigma_r);
    const double p2 = r2 + rng.gaussian(0.0, sigma_r);
    if (p0 < 0.0 || p1 < 0.0 || p2 < 0.0) {
      ++failures;
      continue;
    }
    try {
      speeds.push_back(solve_speed_uniform(p0, p1, p2, dt));
    } catch (const NoSolutionError&) {
      ++failures;
    }
  }
  if (speeds.empty()) {
    throw OracleDegenerateError("speed_std_monte_carlo: every trial failed");
  }

  double mean = 0.0;
  for (double s : speeds) mean += s;
  mean /= static_cast<double>(speeds.size());
  double ss = 0.0;
  for (double s : speeds) ss += (s - mean) * (s - mean);

  MonteCarloSpeedStd out;
  out.n_success = speeds.size();
  out.discard_fraction = static_cast<double>(failures) / static_cast<double>(n_trials);
  out.std_v = speeds.size() > 1
                  ? std::sqrt(ss / static_cast<double>(speeds.size() - 1))
                  : 0.0;
  return out;
}

}  // namespace uwb1a
