#include "uwb1a/fusion_ekf.hpp"

#include <cmath>
#include <stdexcept>

namespace uwb1a {

namespace {

void symmetrize(Mat5& p) { p = 0.5 * (p + p.transpose()).eval(); }

EkfBelief scalar_update(const EkfBelief& belief, const RowVec5& h, double innovation,
                        double meas_var) {
  const double s = (h * belief.P * h.transpose())(0, 0) + meas_var;
  const Vec5 k = belief.P * h.transpose() / s;
  EkfBelief out = belief;
  const Vec5 dx = k * innovation;
  out.mean.x += dx(0);
  out.mean.y += dx(1);
  out.mean.theta = wrap_angle(out.mean.theta + dx(2));
  out.mean.v += dx(3);
  out.mean.w += dx(4);
  const Mat5 ikh = Mat5::Identity() - k * h;
  out.P = ikh * belief.P * ikh.transpose() + meas_var * k * k.transpose();
  symmetrize(out.P);
  return out;
}

}  // namespace

EkfBelief ekf_init(double first_range, double first_heading,
                   const EstimatorConfig& cfg, double t) {
  if (first_range < 0.0) throw std::invalid_argument("ekf_init: negative range");
  EkfBelief b;
  b.mean.x = first_range;
  b.mean.y = 0.0;
  b.mean.theta = wrap_angle(first_heading);
  b.mean.v = 0.0;
  b.mean.w = 0.0;
  const double sp = std::max(first_range / 2.0, 0.5);
  Vec5 d;
  d << sp * sp, sp * sp, cfg.init_sigma_theta * cfg.init_sigma_theta,
      cfg.init_sigma_v * cfg.init_sigma_v, cfg.init_sigma_w * cfg.init_sigma_w;
  b.P = d.asDiagonal();
  b.t = t;
  return b;
}

Mat5 ekf_process_jacobian(const RobotState& s, double dt) {
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  Mat5 f = Mat5::Identity();
  f(0, 2) = -s.v * sn * dt;
  f(0, 3) = c * dt;
  f(1, 2) = s.v * c * dt;
  f(1, 3) = sn * dt;
  f(2, 4) = dt;
  return f;
}

EkfBelief ekf_predict(const EkfBelief& belief, double dt, const EstimatorConfig& cfg) {
  if (!(dt > 0.0)) throw std::invalid_argument("ekf_predict: dt must be > 0");
  const RobotState& s = belief.mean;
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);

  EkfBelief out = belief;
  out.mean.x = s.x + s.v * c * dt;
  out.mean.y = s.y + s.v * sn * dt;
  out.mean.theta = wrap_angle(s.theta + s.w * dt);
  out.t = belief.t + dt;

  const Mat5 f = ekf_process_jacobian(s, dt);

  // Unknown accelerations as continuous white noise mapped through the
  // discrete model: Q = G diag(sigma_a^2, sigma_b^2) G^T / dt keeps the
  // accumulated noise rate-independent.
  Eigen::Matrix<double, 5, 2> g = Eigen::Matrix<double, 5, 2>::Zero();
  g(0, 0) = 0.5 * dt * dt * c;
  g(1, 0) = 0.5 * dt * dt * sn;
  g(2, 1) = 0.5 * dt * dt;
  g(3, 0) = dt;
  g(4, 1) = dt;
  Eigen::Matrix2d qa = Eigen::Vector2d(cfg.sigma_a * cfg.sigma_a,
                                       cfg.sigma_b * cfg.sigma_b)
                           .asDiagonal();
  const Mat5 q = g * qa * g.transpose() / dt;

  out.P = f * belief.P * f.transpose() + q;
  symmetrize(out.P);
  return out;
}

RowVec5 ekf_range_jacobian(const RobotState& s, const AnchorPose& anchor) {
  const double dx = s.x - anchor.x;
  const double dy = s.y - anchor.y;
  const double d = std::hypot(dx, dy);
  RowVec5 h = RowVec5::Zero();
  if (d < 1e-12) return h;
  h(0) = dx / d;
  h(1) = dy / d;
  return h;
}

EkfRangeUpdateResult ekf_update_range(const EkfBelief& belief, double r,
                                      const AnchorPose& anchor, double sigma_r) {
  EkfRangeUpdateResult res;
  const double dx = belief.mean.x - anchor.x;
  const double dy = belief.mean.y - anchor.y;
  const double predicted = std::hypot(dx, dy);
  if (predicted < 1e-6) {
    res.belief = belief;
    res.applied = false;
    return res;
  }
  const RowVec5 h = ekf_range_jacobian(belief.mean, anchor);
  res.belief = scalar_update(belief, h, r - predicted, sigma_r * sigma_r);
  res.applied = true;
  return res;
}

EkfBelief ekf_update_heading(const EkfBelief& belief, double theta_meas,
                             double sigma_theta) {
  if (!std::isfinite(theta_meas)) {
    throw std::invalid_argument("ekf_update_heading: non-finite measurement");
  }
  RowVec5 h = RowVec5::Zero();
  h(2) = 1.0;
  const double innovation = wrap_angle(theta_meas - belief.mean.theta);
  return scalar_update(belief, h, innovation, sigma_theta * sigma_theta);
}

EkfBelief ekf_blend_speed(const EkfBelief& belief, const SpeedEstimate& est,
                          double blend_w) {
  if (blend_w < 0.0 || blend_w > 1.0) {
    throw std::invalid_argument("ekf_blend_speed: blend_w must be in [0,1]");
  }
  if (est.v < 0.0) {
    throw std::invalid_argument("ekf_blend_speed: negative speed estimate");
  }
  EkfBelief out = belief;
  out.mean.v = blend_w * belief.mean.v + (1.0 - blend_w) * est.v;
  for (int i = 0; i < 5; ++i) {
    if (i == 3) continue;
    out.P(3, i) *= blend_w;
    out.P(i, 3) *= blend_w;
  }
  const double floor = est.var_v * (1.0 - blend_w) * (1.0 - blend_w);
  out.P(3, 3) = std::max(belief.P(3, 3), floor);
  symmetrize(out.P);
  return out;
}

}  // namespace uwb1a
