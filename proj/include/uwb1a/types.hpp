#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace uwb1a {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle to (-pi, pi]. Idempotent, preserves the value mod 2*pi.
inline double wrap_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("wrap_angle: non-finite angle");
  }
  double r = std::remainder(theta, kTwoPi);  // exactly rounded, in [-pi, pi]
  if (r <= -kPi) {
    r = kPi;
  }
  return r;
}

/// Planar robot state: position, heading (CCW from +x), linear and
/// angular velocity.
struct RobotState {
  double x = 0.0;      // east [m]
  double y = 0.0;      // north [m]
  double theta = 0.0;  // heading [rad], wrapped to (-pi, pi]
  double v = 0.0;      // linear speed [m/s]
  double w = 0.0;      // angular rate [rad/s]

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta) &&
           std::isfinite(v) && std::isfinite(w);
  }
};

struct ControlInput {
  double a = 0.0;  // linear acceleration [m/s^2]
  double b = 0.0;  // angular acceleration [rad/s^2]
};

struct AnchorPose {
  double x = 0.0;  // anchor east [m]
  double y = 0.0;  // anchor north [m]
};

struct RangeSample {
  double t = 0.0;  // [s], strictly increasing within a stream
  double r = 0.0;  // measured distance [m], >= 0
};

struct HeadingSample {
  double t = 0.0;
  double theta = 0.0;  // [rad]
};

using Vec3 = std::array<double, 3>;

struct ImuSample {
  double t = 0.0;
  Vec3 acc{0.0, 0.0, 0.0};   // specific force [m/s^2]
  Vec3 gyro{0.0, 0.0, 0.0};  // angular rate [rad/s]
  Vec3 mag{0.0, 0.0, 0.0};   // normalized magnetic field
};

/// Unit quaternion, body-to-world.
struct Quaternion {
  double wq = 1.0;
  double xq = 0.0;
  double yq = 0.0;
  double zq = 0.0;

  double norm() const { return std::sqrt(wq * wq + xq * xq + yq * yq + zq * zq); }
};

struct NoiseConfig {
  double sigma_r = 0.2;       // range noise std [m]
  double sigma_theta = 0.1;   // heading noise std [rad]
  double sigma_gyro = 0.005;  // [rad/s]
  double sigma_acc = 0.05;    // [m/s^2]
  double sigma_mag = 0.01;    // normalized field units
  std::uint64_t seed = 0;

  void validate() const {
    if (sigma_r < 0 || sigma_theta < 0 || sigma_gyro < 0 || sigma_acc < 0 ||
        sigma_mag < 0) {
      throw std::invalid_argument("NoiseConfig: negative std");
    }
  }
};

/// Tuning knobs for the tracking stack (speed estimator, range smoother,
/// EKF). Scenario presets may override individual fields; flags and config
/// files override presets.
struct EstimatorConfig {
  // speed estimator
  double th_distance = 0.3;        // range-change trigger threshold [m]
  double th_linear_motion = 0.05;  // gyro-magnitude gate [rad/s]
  double window_ratio = 0.5;       // window entries per meter of range
  std::size_t window_cap = 200;    // latency bound at large range
  bool smooth_ranges = true;       // feed the estimator KF-smoothed ranges

  // speed blend into the EKF
  double blend_w = 0.5;                 // x.v <- blend_w*x.v + (1-blend_w)*est
  bool variance_weighted_blend = false; // per-update blend_w = Pvv/(Pvv+var)

  // EKF process / measurement noise
  double sigma_a = 0.5;            // linear accel process noise [m/s^2]
  double sigma_b = 1.0;            // angular accel process noise [rad/s^2]
  double sigma_r_meas = 0.2;       // assumed range noise [m]
  double sigma_theta_meas = 0.1;   // assumed heading noise [rad]

  // EKF initialization
  double init_sigma_theta = 0.2;   // [rad]
  double init_sigma_v = 2.0;       // [m/s]
  double init_sigma_w = 1.0;       // [rad/s]

  // scalar range smoother (constant range-rate model)
  double kf_q = 0.25;              // rate random-walk density [(m/s)^2 / s]
  double kf_gate_sigma = 5.0;      // innovation gate
  double kf_init_sigma_rdot = 2.0; // [m/s]

  // gate signal smoothing when no raw gyro stream exists
  double gate_tau = 0.7;           // EMA time constant on the EKF's w [s]

  void validate() const {
    if (!(th_distance > 0)) throw std::invalid_argument("th_distance must be > 0");
    if (!(th_linear_motion > 0)) throw std::invalid_argument("th_linear_motion must be > 0");
    if (!(window_ratio > 0)) throw std::invalid_argument("window_ratio must be > 0");
    if (window_cap < 1) throw std::invalid_argument("window_cap must be >= 1");
    if (blend_w < 0 || blend_w > 1) throw std::invalid_argument("blend_w must be in [0,1]");
    if (!(sigma_a >= 0 && sigma_b >= 0 && sigma_r_meas > 0 && sigma_theta_meas > 0)) {
      throw std::invalid_argument("EKF noise parameters out of range");
    }
    if (!(kf_q > 0) || !(kf_gate_sigma > 0) || !(kf_init_sigma_rdot > 0)) {
      throw std::invalid_argument("range smoother parameters out of range");
    }
    if (!(gate_tau > 0)) throw std::invalid_argument("gate_tau must be > 0");
  }
};

}  // namespace uwb1a
