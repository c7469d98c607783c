#pragma once

#include <Eigen/Dense>

#include "uwb1a/speed_estimator.hpp"
#include "uwb1a/types.hpp"

namespace uwb1a {

using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using RowVec5 = Eigen::Matrix<double, 1, 5>;

/// Gaussian belief over [x, y, theta, v, w].
struct EkfBelief {
  RobotState mean;
  Mat5 P = Mat5::Identity();
  double t = 0.0;
};

/// Deliberately coarse bootstrap: position on the range circle along the
/// anchor-frame x-axis, heading from the first heading measurement,
/// zero velocities, and a wide diagonal prior.
EkfBelief ekf_init(double first_range, double first_heading,
                   const EstimatorConfig& cfg, double t);

/// Euler discretization of the unicycle kinematics with unknown
/// accelerations absorbed into process noise.
EkfBelief ekf_predict(const EkfBelief& belief, double dt, const EstimatorConfig& cfg);

/// Jacobian of the discrete prediction map at `state`.
Mat5 ekf_process_jacobian(const RobotState& state, double dt);

/// Jacobian of the anchor-range measurement at `state`.
RowVec5 ekf_range_jacobian(const RobotState& state, const AnchorPose& anchor);

struct EkfRangeUpdateResult {
  EkfBelief belief;
  bool applied = true;  // false when the predicted range was singular
};

/// Scalar EKF update with the anchor-distance measurement. Skipped (and
/// flagged) when the predicted distance is below 1e-6 m.
EkfRangeUpdateResult ekf_update_range(const EkfBelief& belief, double r,
                                      const AnchorPose& anchor, double sigma_r);

/// Scalar EKF update on heading with a wrapped innovation.
EkfBelief ekf_update_heading(const EkfBelief& belief, double theta_meas,
                             double sigma_theta);

/// Convex blend of the belief speed toward an external speed estimate:
/// v <- blend_w * v + (1 - blend_w) * est.v. The (v,v) covariance entry is
/// floored at est.var_v * (1 - blend_w)^2 and v cross-covariances are scaled
/// by blend_w.
EkfBelief ekf_blend_speed(const EkfBelief& belief, const SpeedEstimate& est,
                          double blend_w);

}  // namespace uwb1a
