#include "uwb1a/observability.hpp"

#include <cmath>
#include <stdexcept>

namespace uwb1a {

Eigen::Matrix<double, 5, 5> observability_matrix(const RobotState& s,
                                                 bool include_velocity_rows) {
  if (s.x == 0.0 && s.y == 0.0) {
    throw std::invalid_argument("observability_matrix: state at the anchor origin");
  }
  if (!s.finite()) {
    throw std::invalid_argument("observability_matrix: non-finite state");
  }
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Zero();
  m(0, 0) = s.x;
  m(0, 1) = s.y;
  m(1, 0) = s.v * c;
  m(1, 1) = s.v * sn;
  m(1, 2) = -s.x * s.v * sn + s.y * s.v * c;
  m(1, 3) = s.x * c + s.y * sn;
  m(2, 2) = 1.0;
  if (include_velocity_rows) {
    m(3, 3) = 1.0;
    m(4, 4) = 1.0;
  }
  return m;
}

int numerical_rank(const Eigen::MatrixXd& m, double tol) {
  if (!m.allFinite()) {
    throw std::invalid_argument("numerical_rank: non-finite matrix");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cutoff = tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

ObservabilityReport is_observable(const RobotState& state, bool include_velocity_rows,
                                  double tol) {
  ObservabilityReport rep;
  rep.matrix = observability_matrix(state, include_velocity_rows);
  rep.velocity_rows = include_velocity_rows;
  rep.v_nonzero = state.v != 0.0;
  // Radial-line condition y/x = tan(theta), written cross-product style so
  // x = 0 needs no special casing.
  const double cross = state.x * std::sin(state.theta) - state.y * std::cos(state.theta);
  rep.not_radial_line = std::abs(cross) > 1e-12 * std::max(1.0, std::hypot(state.x, state.y));

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(rep.matrix));
  for (int i = 0; i < 5; ++i) rep.singular_values[static_cast<std::size_t>(i)] = svd.singularValues()(i);
  rep.rank = numerical_rank(Eigen::MatrixXd(rep.matrix), tol);
  rep.observable = rep.rank == 5;
  return rep;
}

}  // namespace uwb1a
