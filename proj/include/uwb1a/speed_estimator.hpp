#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "uwb1a/types.hpp"

namespace uwb1a {

/// A (smoothed range, timestamp) pair admitted by the range-change trigger.
struct KeyRangePair {
  double r = 0.0;  // [m]
  double t = 0.0;  // [s]
};

/// Straight-line motion geometry recovered from three ranges: speed,
/// perpendicular anchor-to-line distance, and the signed along-line offset
/// of the first sample from the foot of the perpendicular.
struct LineGeometry {
  double v = 0.0;       // [m/s], >= 0
  double r_perp = 0.0;  // [m], >= 0
  double s0 = 0.0;      // [m], signed
};

struct SpeedEstimate {
  double v = 0.0;      // variable-window smoothed speed [m/s]
  double var_v = 0.0;  // variance of the smoothed speed [m^2/s^2]
  double t = 0.0;      // timestamp of the latest contributing sample [s]
  double raw_v = 0.0;  // latest per-triple solve [m/s]
  bool stale = false;  // latest solve failed; v repeats the previous value
};

/// Speed magnitude from three ranges at unequal intervals. The robot is
/// assumed to move on a straight line at constant speed; the solution comes
/// from eliminating the line parameters in the three Pythagorean relations
///   r_i^2 = r_perp^2 + (s0 + v * t_i)^2.
/// Throws NoSolutionError when the squared-speed discriminant is negative.
double solve_speed_general(double r0, double r1, double r2, double dt1, double dt2);

/// Uniform-interval closed form: v = sqrt((r2^2 + r0^2 - 2 r1^2) / (2 dt^2)).
double solve_speed_uniform(double r0, double r1, double r2, double dt);

/// Full line geometry for a consistent triple. For v == 0 the geometry is
/// underdetermined; (r_perp = r0, s0 = 0) is returned by convention.
LineGeometry solve_line_geometry(double r0, double r1, double r2, double dt1, double dt2);

/// Smoothing window size as a function of anchor distance:
/// max(1, ceil(range * window_ratio)), capped.
std::size_t window_length(double range, double window_ratio, std::size_t cap = 200);

/// Streaming three-range speed estimator with range-change triggering and
/// variable-window averaging. Single writer; instances are independent.
class SpeedEstimator {
 public:
  explicit SpeedEstimator(const EstimatorConfig& cfg);

  /// True when `smoothed_range` differs from the last admitted key range by
  /// more than th_distance (or no key exists yet).
  bool should_trigger(double smoothed_range) const;

  /// Applies the trigger; admits the sample as a key pair when it fires.
  std::optional<SpeedEstimate> offer(double smoothed_range, double t);

  /// Admits a key pair unconditionally (caller owns the trigger). Returns an
  /// estimate once three key pairs are available. Failed solves (negative
  /// discriminant) are dropped, counted, and reported stale.
  std::optional<SpeedEstimate> push_key_range(const KeyRangePair& kp);

  /// Drops keys, the speed window, and the last estimate. Called when the
  /// constant-velocity assumption breaks (gate closure).
  void flush();

  std::size_t key_count() const { return keys_.size(); }
  std::size_t total_keys() const { return total_keys_; }
  std::size_t failed_solves() const { return failed_solves_; }
  const std::deque<double>& speed_window() const { return speeds_; }
  std::optional<KeyRangePair> last_key() const;

 private:
  EstimatorConfig cfg_;
  std::deque<KeyRangePair> keys_;  // at most 3 retained
  std::deque<double> speeds_;      // raw per-triple speeds, bounded by cap
  std::optional<SpeedEstimate> last_;
  std::size_t failed_solves_ = 0;
  std::size_t total_keys_ = 0;
  double last_t_ = -1.0;
};

}  // namespace uwb1a
