#include "uwb1a/orientation_filter.hpp"

#include <cmath>
#include <stdexcept>

namespace uwb1a {

namespace {

double norm3(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

Vec3 scaled(const Vec3& v, double s) { return {v[0] * s, v[1] * s, v[2] * s}; }

/// Shortest-arc rotation taking unit vector `from` to unit vector `to`.
Quaternion quat_between(const Vec3& from, const Vec3& to) {
  const double d = from[0] * to[0] + from[1] * to[1] + from[2] * to[2];
  Vec3 c{from[1] * to[2] - from[2] * to[1],
         from[2] * to[0] - from[0] * to[2],
         from[0] * to[1] - from[1] * to[0]};
  if (d < -1.0 + 1e-12) {
    // Antipodal: rotate pi about any axis orthogonal to `from`.
    Vec3 axis{-from[1], from[0], 0.0};
    if (norm3(axis) < 1e-9) axis = {0.0, -from[2], from[1]};
    const double n = norm3(axis);
    return {0.0, axis[0] / n, axis[1] / n, axis[2] / n};
  }
  Quaternion q{1.0 + d, c[0], c[1], c[2]};
  return quat_normalized(q);
}

}  // namespace

Quaternion quat_multiply(const Quaternion& a, const Quaternion& b) {
  return {
      a.wq * b.wq - a.xq * b.xq - a.yq * b.yq - a.zq * b.zq,
      a.wq * b.xq + a.xq * b.wq + a.yq * b.zq - a.zq * b.yq,
      a.wq * b.yq - a.xq * b.zq + a.yq * b.wq + a.zq * b.xq,
      a.wq * b.zq + a.xq * b.yq - a.yq * b.xq + a.zq * b.wq,
  };
}

Quaternion quat_conjugate(const Quaternion& q) { return {q.wq, -q.xq, -q.yq, -q.zq}; }

Quaternion quat_normalized(const Quaternion& q) {
  const double n = q.norm();
  if (n <= 0.0 || !std::isfinite(n)) {
    throw std::invalid_argument("quat_normalized: degenerate quaternion");
  }
  return {q.wq / n, q.xq / n, q.yq / n, q.zq / n};
}

Vec3 quat_rotate(const Quaternion& q, const Vec3& v) {
  const Quaternion p{0.0, v[0], v[1], v[2]};
  const Quaternion r = quat_multiply(quat_multiply(q, p), quat_conjugate(q));
  return {r.xq, r.yq, r.zq};
}

Quaternion quat_from_rotvec(const Vec3& rotvec) {
  const double angle = norm3(rotvec);
  if (angle < 1e-12) {
    return quat_normalized({1.0, 0.5 * rotvec[0], 0.5 * rotvec[1], 0.5 * rotvec[2]});
  }
  const double s = std::sin(0.5 * angle) / angle;
  return {std::cos(0.5 * angle), rotvec[0] * s, rotvec[1] * s, rotvec[2] * s};
}

Quaternion quat_from_euler(double yaw, double pitch, double roll) {
  const Quaternion qz{std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw)};
  const Quaternion qy{std::cos(0.5 * pitch), 0.0, std::sin(0.5 * pitch), 0.0};
  const Quaternion qx{std::cos(0.5 * roll), std::sin(0.5 * roll), 0.0, 0.0};
  return quat_multiply(quat_multiply(qz, qy), qx);
}

Quaternion quat_pow(const Quaternion& q, double t) {
  Quaternion u = q;
  if (u.wq < 0.0) {  // take the short arc
    u = {-u.wq, -u.xq, -u.yq, -u.zq};
  }
  const double sin_half = std::sqrt(u.xq * u.xq + u.yq * u.yq + u.zq * u.zq);
  if (sin_half < 1e-12) return {1.0, 0.0, 0.0, 0.0};
  const double half = std::atan2(sin_half, u.wq);
  const double scaled_half = half * t;
  const double s = std::sin(scaled_half) / sin_half;
  return {std::cos(scaled_half), u.xq * s, u.yq * s, u.zq * s};
}

HeadingResult heading_from_quaternion(const Quaternion& q) {
  HeadingResult out;
  const double sin_pitch = 2.0 * (q.wq * q.yq - q.zq * q.xq);
  const double clamped = std::max(-1.0, std::min(1.0, sin_pitch));
  if (std::abs(std::asin(clamped)) > 89.0 * kPi / 180.0) {
    out.low_confidence = true;
  }
  out.theta = std::atan2(2.0 * (q.wq * q.zq + q.xq * q.yq),
                         1.0 - 2.0 * (q.yq * q.yq + q.zq * q.zq));
  if (out.theta <= -kPi) out.theta = kPi;
  return out;
}

AttitudeState attitude_update(const AttitudeState& state, const ImuSample& sample,
                              double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("attitude_update: dt must be > 0");

  AttitudeState out = state;
  out.acc_skipped = false;
  out.mag_skipped = false;

  // Gyro prediction (exact within the step for constant rate).
  out.q = quat_multiply(state.q, quat_from_rotvec(scaled(sample.gyro, dt)));

  // Tilt correction: rotate measured gravity into the world frame and pull
  // it toward +z by a fraction gain_acc.
  const double an = norm3(sample.acc);
  if (an > 1e-9) {
    const Vec3 acc_w = quat_rotate(out.q, scaled(sample.acc, 1.0 / an));
    const Quaternion dq = quat_between(acc_w, {0.0, 0.0, 1.0});
    out.q = quat_multiply(quat_pow(dq, state.gain_acc), out.q);
  } else {
    out.acc_skipped = true;
  }

  // Yaw correction: horizontal projection of the world-frame magnetometer
  // should point along +x.
  const double mn = norm3(sample.mag);
  if (mn > 1e-9) {
    const Vec3 mag_w = quat_rotate(out.q, scaled(sample.mag, 1.0 / mn));
    const double horiz = std::hypot(mag_w[0], mag_w[1]);
    if (horiz > 1e-9) {
      const double yaw_err = std::atan2(mag_w[1], mag_w[0]);
      const Quaternion rz{std::cos(-0.5 * state.gain_mag * yaw_err), 0.0, 0.0,
                          std::sin(-0.5 * state.gain_mag * yaw_err)};
      out.q = quat_multiply(rz, out.q);
    } else {
      out.mag_skipped = true;
    }
  } else {
    out.mag_skipped = true;
  }

  out.q = quat_normalized(out.q);
  return out;
}

}  // namespace uwb1a
