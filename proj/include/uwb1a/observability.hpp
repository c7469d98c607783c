#pragma once

#include <array>

#include <Eigen/Dense>

#include "uwb1a/types.hpp"

namespace uwb1a {

/// Rank analysis of the observability codistribution for the single-anchor
/// range + heading (+ optional velocity) measurement set.
struct ObservabilityReport {
  Eigen::Matrix<double, 5, 5> matrix;
  int rank = 0;
  std::array<double, 5> singular_values{};
  bool v_nonzero = false;        // v != 0 at the evaluated state
  bool not_radial_line = false;  // y/x != tan(theta) at the evaluated state
  bool velocity_rows = true;     // velocity measurement gradients included
  bool observable = false;       // rank == 5
};

/// Gradient matrix of the output span evaluated at `state`, with the anchor
/// at the origin and the squared-distance output d^2/2:
///   [ x            y           0                    0                  0 ]
///   [ v cos(th)    v sin(th)  -x v sin(th)+y v cos(th)  x cos(th)+y sin(th)  0 ]
///   [ 0            0           1                    0                  0 ]
///   [ 0            0           0                    1                  0 ]
///   [ 0            0           0                    0                  1 ]
/// With include_velocity_rows = false the last two rows (the linear and
/// angular velocity measurement gradients) are zeroed.
Eigen::Matrix<double, 5, 5> observability_matrix(const RobotState& state,
                                                 bool include_velocity_rows);

/// Singular values above tol * sigma_max.
int numerical_rank(const Eigen::MatrixXd& m, double tol);

ObservabilityReport is_observable(const RobotState& state, bool include_velocity_rows,
                                  double tol = 1e-10);

}  // namespace uwb1a
