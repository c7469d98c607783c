#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "uwb1a/simulator.hpp"
#include "uwb1a/types.hpp"

namespace uwb1a {

enum class TrackMode { WithSpeedEstimator, Vanilla };

struct PoseSample {
  double t = 0.0;
  RobotState state;
  std::array<double, 5> cov_diag{};
  bool speed_corrected = false;  // a fresh speed estimate was blended here
};

struct PoseTrack {
  std::vector<PoseSample> samples;
};

struct SpeedTracePoint {
  double t = 0.0;
  double raw_v = 0.0;       // latest per-triple solve
  double windowed_v = 0.0;  // variable-window average
  bool blended = false;     // fed into the EKF at this point
  bool stale = false;
};

struct PipelineResult {
  PoseTrack track;
  std::vector<SpeedTracePoint> speed_trace;
  std::size_t blend_count = 0;
  std::size_t failed_solves = 0;
  std::size_t skipped_range_updates = 0;
  std::size_t smoother_outliers = 0;
};

/// True when the yaw-rate magnitude is below the linear-motion threshold.
bool linear_motion_gate(double gyro_z, double th);

/// Runs the full fusion loop over a time-ordered sensor log: EKF predict +
/// range/heading updates, scalar range smoothing, range-change-triggered
/// speed estimation behind the linear-motion gate, and the speed blend.
/// Vanilla mode disables the speed-estimator branch entirely.
PipelineResult run_pipeline(const SensorLog& log, const EstimatorConfig& cfg,
                            TrackMode mode);

/// Standalone speed-estimator pass over the range stream (no EKF, no gate):
/// smoothing per cfg.smooth_ranges, then trigger + three-range solve +
/// variable-window average.
std::vector<SpeedTracePoint> run_speed_trace(const SensorLog& log,
                                             const EstimatorConfig& cfg);

}  // namespace uwb1a
