#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uwb1a/types.hpp"

namespace uwb1a {

/// One piecewise-constant-velocity motion stage.
struct StageProfile {
  double duration = 0.0;  // [s], > 0
  double v = 0.0;         // [m/s]
  double w = 0.0;         // [rad/s]
};

struct TruthSample {
  double t = 0.0;
  RobotState state;
};

struct TruthTrack {
  std::vector<TruthSample> samples;

  bool empty() const { return samples.empty(); }
  double t_begin() const;
  double t_end() const;
  /// Linear interpolation (wrap-aware for heading). t is clamped to the
  /// track's span.
  RobotState interpolate(double t) const;
};

struct LogMeta {
  AnchorPose anchor;
  NoiseConfig noise;
  std::string scenario;
  std::vector<StageProfile> stages;
  double range_rate = 10.0;    // [Hz]
  double heading_rate = 100.0; // [Hz]
  double step = 0.01;          // truth integration step [s]
  std::map<std::string, std::string> extra;
};

/// Time-ordered merged sensor capture. Heading samples carry the direct
/// noisy-heading channel; the IMU stream is present in IMU synthesis mode.
struct SensorLog {
  LogMeta meta;
  std::vector<RangeSample> ranges;
  std::vector<HeadingSample> headings;
  std::vector<ImuSample> imu;
  std::optional<TruthTrack> truth;
};

/// Exact constant-twist integration of one stage from `initial` at times
/// t0 + k*step (k = 1..duration/step). Straight line for w == 0, a circular
/// arc of radius v/w otherwise.
std::vector<TruthSample> integrate_stage(const RobotState& initial,
                                         const StageProfile& stage, double step,
                                         double t0);

/// Chains stages, starting the track with the initial state at t = 0.
TruthTrack integrate_stages(const RobotState& start,
                            const std::vector<StageProfile>& stages, double step);

/// Samples the truth at the given rates and corrupts ranges/headings with
/// seeded Gaussian noise. Ranges are clamped at zero. When with_imu is set,
/// an IMU stream consistent with the planar motion is synthesized at the
/// heading rate.
SensorLog sensorize(const TruthTrack& truth, const AnchorPose& anchor,
                    const NoiseConfig& cfg, double range_rate, double heading_rate,
                    bool with_imu = false);

/// A named, fully specified simulation setup.
struct Scenario {
  std::string name;
  RobotState start;
  std::vector<StageProfile> stages;
  AnchorPose anchor;
  NoiseConfig noise;
  double step = 0.01;
  double range_rate = 10.0;
  double heading_rate = 100.0;
  bool with_imu = false;
  /// Tracker settings this scenario was tuned with; `track` applies them
  /// when the log names the scenario.
  EstimatorConfig tracker;
};

const std::vector<std::string>& scenario_names();

/// Throws std::invalid_argument for unknown names.
Scenario get_scenario(const std::string& name, std::uint64_t seed);

std::pair<TruthTrack, SensorLog> simulate_scenario(const Scenario& scenario);

/// The five-stage scenario behind the headline comparison: anchor (0,0),
/// start (10,0), range noise 0.2 m, heading noise 0.1 rad.
std::pair<TruthTrack, SensorLog> paper_scenario_sim(std::uint64_t seed = 0);

}  // namespace uwb1a
