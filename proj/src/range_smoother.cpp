#include "uwb1a/range_smoother.hpp"

#include <cmath>
#include <stdexcept>

namespace uwb1a {

namespace {
void symmetrize(Eigen::Matrix2d& p) { p = 0.5 * (p + p.transpose()).eval(); }
}  // namespace

RangeFilterState range_init(const RangeSample& z, double sigma_r, double init_sigma_rdot) {
  if (z.r < 0.0) throw std::invalid_argument("range_init: negative range");
  RangeFilterState s;
  s.r_hat = z.r;
  s.rdot_hat = 0.0;
  s.P = Eigen::Vector2d(sigma_r * sigma_r, init_sigma_rdot * init_sigma_rdot).asDiagonal();
  return s;
}

RangeFilterState range_predict(const RangeFilterState& state, double dt, double q) {
  if (!(dt > 0.0)) throw std::invalid_argument("range_predict: dt must be > 0");
  RangeFilterState out = state;
  out.r_hat = state.r_hat + state.rdot_hat * dt;
  Eigen::Matrix2d f;
  f << 1.0, dt, 0.0, 1.0;
  Eigen::Matrix2d qm;
  qm << q * dt * dt * dt / 3.0, q * dt * dt / 2.0,
        q * dt * dt / 2.0,     q * dt;
  out.P = f * state.P * f.transpose() + qm;
  symmetrize(out.P);
  return out;
}

RangeUpdateResult range_update(const RangeFilterState& state, const RangeSample& z,
                               double sigma_r, double gate_sigma) {
  if (z.r < 0.0) throw std::invalid_argument("range_update: negative range");
  RangeUpdateResult res;
  res.state = state;
  res.innovation = z.r - state.r_hat;
  res.innovation_var = state.P(0, 0) + sigma_r * sigma_r;
  if (res.innovation * res.innovation >
      gate_sigma * gate_sigma * res.innovation_var) {
    res.applied = false;
    return res;
  }
  const Eigen::Vector2d k = state.P.col(0) / res.innovation_var;
  res.state.r_hat = state.r_hat + k(0) * res.innovation;
  res.state.rdot_hat = state.rdot_hat + k(1) * res.innovation;
  Eigen::Matrix2d ikh = Eigen::Matrix2d::Identity();
  ikh.col(0) -= k;
  // Joseph form keeps P PSD under roundoff.
  res.state.P = ikh * state.P * ikh.transpose() +
                (sigma_r * sigma_r) * k * k.transpose();
  symmetrize(res.state.P);
  if (res.state.r_hat < 0.0) res.state.r_hat = 0.0;
  res.applied = true;
  return res;
}

double RangeSmoother::step(const RangeSample& z) {
  if (!initialized_) {
    state_ = range_init(z, cfg_.sigma_r_meas, cfg_.kf_init_sigma_rdot);
    initialized_ = true;
    t_ = z.t;
    return state_.r_hat;
  }
  const double dt = z.t - t_;
  if (dt > 0.0) {
    state_ = range_predict(state_, dt, cfg_.kf_q);
  }
  t_ = z.t;
  auto res = range_update(state_, z, cfg_.sigma_r_meas, cfg_.kf_gate_sigma);
  state_ = res.state;
  if (!res.applied) ++outliers_;
  return state_.r_hat;
}

}  // namespace uwb1a
