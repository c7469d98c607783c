#pragma once

#include <string>

#include "uwb1a/metrics.hpp"
#include "uwb1a/pipeline.hpp"
#include "uwb1a/simulator.hpp"

namespace uwb1a {

// Plain-CSV formats with a `# key: value` comment header, documented in
// FORMAT.md. Writers are deterministic (fixed key order, 6-decimal fields);
// parsers reject anything the writers cannot produce with a ParseError
// carrying the 1-based line number.

std::string write_sensor_log(const SensorLog& log);
SensorLog parse_sensor_log(const std::string& text);

std::string write_truth_track(const TruthTrack& track);
TruthTrack parse_truth_track(const std::string& text);

std::string write_pose_track(const PoseTrack& track);
PoseTrack parse_pose_track(const std::string& text);

/// Columns: t,error_m,windowed_rmse_m.
std::string write_error_series_csv(const ErrorSeries& series);

/// Columns: t,raw_speed,smoothed_speed,blended,stale.
std::string write_speed_trace_csv(const std::vector<SpeedTracePoint>& trace);

/// Write-temp-then-rename so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace uwb1a
