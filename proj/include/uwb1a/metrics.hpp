#pragma once

#include <optional>
#include <vector>

#include "uwb1a/pipeline.hpp"
#include "uwb1a/simulator.hpp"

namespace uwb1a {

enum class Alignment { None, Rigid2d };

struct ErrorPoint {
  double t = 0.0;
  double value = 0.0;
};

struct ErrorSeries {
  std::vector<ErrorPoint> errors;    // per-sample position error [m]
  std::vector<ErrorPoint> windowed;  // trailing-window RMSE [m]
  double rmse = 0.0;
  double max_error = 0.0;
  double heading_mae = 0.0;          // wrapped absolute mean [rad]
  std::optional<double> ate;         // filled by evaluate() when requested
};

/// Root-mean-square position error over the estimate timestamps, with the
/// truth linearly interpolated. Requires overlapping time ranges.
double rmse(const PoseTrack& est, const TruthTrack& truth);

/// Absolute trajectory error against a reference track. Pairs are associated
/// by nearest timestamp within `assoc_tol`; Rigid2d applies the
/// least-squares planar rotation + translation before the error.
double ate(const PoseTrack& est, const TruthTrack& ref, Alignment align,
           double assoc_tol = 0.05);

/// Trailing-window RMSE series emitted at estimate timestamps.
ErrorSeries windowed_rmse(const PoseTrack& est, const TruthTrack& truth,
                          double window);

/// Full summary: per-sample errors, windowed series, RMSE, max, heading MAE.
ErrorSeries evaluate(const PoseTrack& est, const TruthTrack& truth, double window,
                     std::optional<Alignment> ate_alignment = std::nullopt);

}  // namespace uwb1a
