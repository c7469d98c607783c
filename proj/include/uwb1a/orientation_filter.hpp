#pragma once

#include "uwb1a/types.hpp"

namespace uwb1a {

// Quaternion helpers (body-to-world convention, scalar first).

Quaternion quat_multiply(const Quaternion& a, const Quaternion& b);
Quaternion quat_conjugate(const Quaternion& q);
Quaternion quat_normalized(const Quaternion& q);
Vec3 quat_rotate(const Quaternion& q, const Vec3& v);

/// Exponential-map rotation: axis-angle (omega * dt) to quaternion.
Quaternion quat_from_rotvec(const Vec3& rotvec);

/// Z-Y-X Euler composition (yaw about z, then pitch about y, then roll about x).
Quaternion quat_from_euler(double yaw, double pitch, double roll);

/// Fractional rotation: slerp from identity, i.e. scales the rotation angle by t.
Quaternion quat_pow(const Quaternion& q, double t);

struct HeadingResult {
  double theta = 0.0;          // yaw in (-pi, pi]
  bool low_confidence = false; // |pitch| > 89 deg: yaw poorly defined
};

/// Yaw about the world vertical under the Z-Y-X convention.
HeadingResult heading_from_quaternion(const Quaternion& q);

/// Complementary attitude filter: gyro prediction with fractional algebraic
/// corrections from gravity (tilt) and the horizontally projected
/// magnetometer (yaw). Reference field points along world +x.
struct AttitudeState {
  Quaternion q;            // body-to-world
  double gain_acc = 0.01;  // tilt correction fraction per update
  double gain_mag = 0.01;  // yaw correction fraction per update
  bool acc_skipped = false;  // last update skipped the tilt correction
  bool mag_skipped = false;  // last update skipped the yaw correction
};

/// One predict/correct cycle. Throws std::invalid_argument for dt <= 0;
/// zero-norm accelerometer or magnetometer vectors skip that correction and
/// set the corresponding flag.
AttitudeState attitude_update(const AttitudeState& state, const ImuSample& sample,
                              double dt);

}  // namespace uwb1a
