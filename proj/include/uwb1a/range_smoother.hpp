#pragma once

#include <Eigen/Dense>

#include "uwb1a/types.hpp"

namespace uwb1a {

/// Constant range-rate Kalman filter state over the raw UWB range stream.
struct RangeFilterState {
  double r_hat = 0.0;     // smoothed range [m], clamped >= 0
  double rdot_hat = 0.0;  // range rate [m/s]
  Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
};

/// First measurement bootstraps the state: r_hat = z, rdot_hat = 0,
/// P = diag(sigma_r^2, init_sigma_rdot^2).
RangeFilterState range_init(const RangeSample& z, double sigma_r, double init_sigma_rdot);

/// Constant-rate propagation with continuous white-noise acceleration of
/// spectral density q on the rate channel.
RangeFilterState range_predict(const RangeFilterState& state, double dt, double q);

struct RangeUpdateResult {
  RangeFilterState state;
  bool applied = true;       // false when the innovation gate rejected z
  double innovation = 0.0;   // z - r_hat (prior)
  double innovation_var = 0.0;
};

/// Scalar Kalman update with measurement variance sigma_r^2 and an
/// innovation gate at gate_sigma standard deviations. Gated samples leave
/// the state untouched.
RangeUpdateResult range_update(const RangeFilterState& state, const RangeSample& z,
                               double sigma_r, double gate_sigma);

/// Streaming wrapper used by the pipeline.
class RangeSmoother {
 public:
  explicit RangeSmoother(const EstimatorConfig& cfg) : cfg_(cfg) {}

  /// Predict to time t, then update with the sample. Returns the smoothed range.
  double step(const RangeSample& z);

  bool initialized() const { return initialized_; }
  const RangeFilterState& state() const { return state_; }
  std::size_t outliers() const { return outliers_; }

 private:
  EstimatorConfig cfg_;
  RangeFilterState state_;
  bool initialized_ = false;
  double t_ = 0.0;
  std::size_t outliers_ = 0;
};

}  // namespace uwb1a
