#include "uwb1a/speed_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "uwb1a/errors.hpp"

namespace uwb1a {

namespace {

// r_b^2 - r_a^2 without forming the squares, to avoid cancellation on
// large, nearly equal ranges.
double diff_of_squares(double rb, double ra) { return (rb - ra) * (rb + ra); }

void check_triple(double r0, double r1, double r2, double dt1, double dt2) {
  if (!(dt1 > 0.0) || !(dt2 > 0.0)) {
    throw std::invalid_argument("speed solve: sampling intervals must be > 0");
  }
  if (r0 < 0.0 || r1 < 0.0 || r2 < 0.0) {
    throw std::invalid_argument("speed solve: ranges must be >= 0");
  }
  if (!std::isfinite(r0) || !std::isfinite(r1) || !std::isfinite(r2) ||
      !std::isfinite(dt1) || !std::isfinite(dt2)) {
    throw std::invalid_argument("speed solve: non-finite input");
  }
}

}  // namespace

double solve_speed_general(double r0, double r1, double r2, double dt1, double dt2) {
  check_triple(r0, r1, r2, dt1, dt2);
  // Eliminating r_perp and s0 from the three Pythagorean relations leaves
  //   v^2 = [(r2^2 - r1^2) - (dt2/dt1) (r1^2 - r0^2)] / (dt1 dt2 + dt2^2).
  const double num = diff_of_squares(r2, r1) - (dt2 / dt1) * diff_of_squares(r1, r0);
  const double den = dt2 * (dt1 + dt2);
  const double v2 = num / den;
  if (v2 < 0.0) {
    throw NoSolutionError("speed solve: negative discriminant", v2);
  }
  return std::sqrt(v2);
}

double solve_speed_uniform(double r0, double r1, double r2, double dt) {
  check_triple(r0, r1, r2, dt, dt);
  const double d = diff_of_squares(r2, r1) - diff_of_squares(r1, r0);
  if (d < 0.0) {
    throw NoSolutionError("speed solve: negative discriminant", d);
  }
  return std::sqrt(d / (2.0 * dt * dt));
}

LineGeometry solve_line_geometry(double r0, double r1, double r2, double dt1, double dt2) {
  const double v = solve_speed_general(r0, r1, r2, dt1, dt2);
  LineGeometry g;
  g.v = v;
  if (v == 0.0) {
    // Stationary: any (r_perp, s0) with r_perp^2 + s0^2 = r0^2 fits.
    g.r_perp = r0;
    g.s0 = 0.0;
    return g;
  }
  g.s0 = (diff_of_squares(r1, r0) - v * v * dt1 * dt1) / (2.0 * v * dt1);
  const double rp2 = (r0 - g.s0) * (r0 + g.s0);
  if (rp2 < 0.0) {
    throw NoSolutionError("line geometry: imaginary perpendicular distance", rp2);
  }
  g.r_perp = std::sqrt(rp2);
  return g;
}

std::size_t window_length(double range, double window_ratio, std::size_t cap) {
  if (range < 0.0 || !std::isfinite(range)) {
    throw std::invalid_argument("window_length: range must be finite and >= 0");
  }
  const double n = std::ceil(range * window_ratio);
  if (n <= 1.0) return 1;
  if (n >= static_cast<double>(cap)) return cap;
  return static_cast<std::size_t>(n);
}

SpeedEstimator::SpeedEstimator(const EstimatorConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
}

bool SpeedEstimator::should_trigger(double smoothed_range) const {
  if (keys_.empty()) return true;
  return std::abs(smoothed_range - keys_.back().r) > cfg_.th_distance;
}

std::optional<SpeedEstimate> SpeedEstimator::offer(double smoothed_range, double t) {
  if (!should_trigger(smoothed_range)) return std::nullopt;
  return push_key_range({smoothed_range, t});
}

std::optional<SpeedEstimate> SpeedEstimator::push_key_range(const KeyRangePair& kp) {
  if (!(kp.t > last_t_)) {
    throw std::invalid_argument("push_key_range: non-monotone timestamp");
  }
  last_t_ = kp.t;
  keys_.push_back(kp);
  ++total_keys_;
  if (keys_.size() > 3) keys_.pop_front();
  if (keys_.size() < 3) return std::nullopt;

  const KeyRangePair& a = keys_[0];
  const KeyRangePair& b = keys_[1];
  const KeyRangePair& c = keys_[2];
  double raw = 0.0;
  try {
    raw = solve_speed_general(a.r, b.r, c.r, b.t - a.t, c.t - b.t);
  } catch (const NoSolutionError&) {
    ++failed_solves_;
    if (!last_) return std::nullopt;
    last_->stale = true;
    return last_;
  }

  speeds_.push_back(raw);
  while (speeds_.size() > cfg_.window_cap) speeds_.pop_front();

  const std::size_t win =
      std::min(window_length(c.r, cfg_.window_ratio, cfg_.window_cap), speeds_.size());
  const auto begin = speeds_.end() - static_cast<std::ptrdiff_t>(win);
  const double mean = std::accumulate(begin, speeds_.end(), 0.0) / static_cast<double>(win);
  double var = 0.0;
  if (win >= 2) {
    double ss = 0.0;
    for (auto it = begin; it != speeds_.end(); ++it) {
      ss += (*it - mean) * (*it - mean);
    }
    // variance of the window mean
    var = ss / static_cast<double>(win - 1) / static_cast<double>(win);
  } else {
    var = 1.0;  // single-sample window: weakly informative
  }

  SpeedEstimate est;
  est.v = mean;
  est.var_v = var;
  est.t = c.t;
  est.raw_v = raw;
  est.stale = false;
  last_ = est;
  return est;
}

void SpeedEstimator::flush() {
  keys_.clear();
  speeds_.clear();
  last_.reset();
}

std::optional<KeyRangePair> SpeedEstimator::last_key() const {
  if (keys_.empty()) return std::nullopt;
  return keys_.back();
}

}  // namespace uwb1a
