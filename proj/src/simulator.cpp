#include "uwb1a/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uwb1a/random.hpp"

namespace uwb1a {

namespace {

constexpr double kGravity = 9.80665;

// Stream-separation constants so adding one stream never reshuffles the
// noise of another.
constexpr std::uint64_t kRangeStream = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kHeadingStream = 0xBF58476D1CE4E5B9ull;
constexpr std::uint64_t kImuStream = 0x94D049BB133111EBull;

RobotState twist_advance(const RobotState& s, double v, double w, double tau) {
  RobotState out = s;
  if (w == 0.0) {
    out.x = s.x + v * std::cos(s.theta) * tau;
    out.y = s.y + v * std::sin(s.theta) * tau;
  } else {
    const double radius = v / w;
    out.x = s.x + radius * (std::sin(s.theta + w * tau) - std::sin(s.theta));
    out.y = s.y - radius * (std::cos(s.theta + w * tau) - std::cos(s.theta));
    out.theta = wrap_angle(s.theta + w * tau);
  }
  out.v = v;
  out.w = w;
  return out;
}

}  // namespace

double TruthTrack::t_begin() const {
  if (samples.empty()) throw std::invalid_argument("TruthTrack: empty");
  return samples.front().t;
}

double TruthTrack::t_end() const {
  if (samples.empty()) throw std::invalid_argument("TruthTrack: empty");
  return samples.back().t;
}

RobotState TruthTrack::interpolate(double t) const {
  if (samples.empty()) throw std::invalid_argument("TruthTrack: empty");
  if (t <= samples.front().t) return samples.front().state;
  if (t >= samples.back().t) return samples.back().state;
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const TruthSample& s, double tt) { return s.t < tt; });
  const TruthSample& b = *it;
  const TruthSample& a = *(it - 1);
  const double span = b.t - a.t;
  const double f = span > 0.0 ? (t - a.t) / span : 0.0;
  RobotState out;
  out.x = a.state.x + f * (b.state.x - a.state.x);
  out.y = a.state.y + f * (b.state.y - a.state.y);
  out.theta = wrap_angle(a.state.theta + f * wrap_angle(b.state.theta - a.state.theta));
  out.v = a.state.v + f * (b.state.v - a.state.v);
  out.w = a.state.w + f * (b.state.w - a.state.w);
  return out;
}

std::vector<TruthSample> integrate_stage(const RobotState& initial,
                                         const StageProfile& stage, double step,
                                         double t0) {
  if (!(step > 0.0)) throw std::invalid_argument("integrate_stage: step must be > 0");
  if (!(stage.duration > 0.0)) {
    throw std::invalid_argument("integrate_stage: duration must be > 0");
  }
  if (step > stage.duration) {
    throw std::invalid_argument("integrate_stage: step exceeds stage duration");
  }
  const auto n = static_cast<std::size_t>(std::llround(stage.duration / step));
  std::vector<TruthSample> out;
  out.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double tau = static_cast<double>(k) * step;
    out.push_back({t0 + tau, twist_advance(initial, stage.v, stage.w, tau)});
  }
  return out;
}

TruthTrack integrate_stages(const RobotState& start,
                            const std::vector<StageProfile>& stages, double step) {
  TruthTrack track;
  RobotState cursor = start;
  cursor.v = stages.empty() ? 0.0 : stages.front().v;
  cursor.w = stages.empty() ? 0.0 : stages.front().w;
  track.samples.push_back({0.0, cursor});
  double t0 = 0.0;
  for (const StageProfile& stage : stages) {
    auto segment = integrate_stage(cursor, stage, step, t0);
    if (!segment.empty()) {
      cursor = segment.back().state;
      t0 = segment.back().t;
    }
    track.samples.insert(track.samples.end(), segment.begin(), segment.end());
  }
  return track;
}

SensorLog sensorize(const TruthTrack& truth, const AnchorPose& anchor,
                    const NoiseConfig& cfg, double range_rate, double heading_rate,
                    bool with_imu) {
  if (!(range_rate > 0.0) || !(heading_rate > 0.0)) {
    throw std::invalid_argument("sensorize: rates must be > 0");
  }
  cfg.validate();

  SensorLog log;
  log.meta.anchor = anchor;
  log.meta.noise = cfg;
  log.meta.range_rate = range_rate;
  log.meta.heading_rate = heading_rate;
  log.truth = truth;

  const double t0 = truth.t_begin();
  const double t1 = truth.t_end();

  Rng range_rng(cfg.seed ^ kRangeStream);
  const auto n_ranges = static_cast<std::size_t>(std::floor((t1 - t0) * range_rate)) + 1;
  log.ranges.reserve(n_ranges);
  for (std::size_t k = 0; k < n_ranges; ++k) {
    const double t = t0 + static_cast<double>(k) / range_rate;
    const RobotState s = truth.interpolate(t);
    const double d = std::hypot(s.x - anchor.x, s.y - anchor.y);
    const double r = std::max(0.0, d + range_rng.gaussian(0.0, cfg.sigma_r));
    log.ranges.push_back({t, r});
  }

  Rng heading_rng(cfg.seed ^ kHeadingStream);
  const auto n_headings =
      static_cast<std::size_t>(std::floor((t1 - t0) * heading_rate)) + 1;
  log.headings.reserve(n_headings);
  for (std::size_t k = 0; k < n_headings; ++k) {
    const double t = t0 + static_cast<double>(k) / heading_rate;
    const RobotState s = truth.interpolate(t);
    log.headings.push_back(
        {t, wrap_angle(s.theta + heading_rng.gaussian(0.0, cfg.sigma_theta))});
  }

  if (with_imu) {
    Rng imu_rng(cfg.seed ^ kImuStream);
    log.imu.reserve(n_headings);
    for (std::size_t k = 0; k < n_headings; ++k) {
      const double t = t0 + static_cast<double>(k) / heading_rate;
      const RobotState s = truth.interpolate(t);
      ImuSample imu;
      imu.t = t;
      // Planar motion: centripetal specific force to the body-left plus
      // gravity reaction along body z.
      imu.acc = {imu_rng.gaussian(0.0, cfg.sigma_acc),
                 s.v * s.w + imu_rng.gaussian(0.0, cfg.sigma_acc),
                 kGravity + imu_rng.gaussian(0.0, cfg.sigma_acc)};
      imu.gyro = {imu_rng.gaussian(0.0, cfg.sigma_gyro),
                  imu_rng.gaussian(0.0, cfg.sigma_gyro),
                  s.w + imu_rng.gaussian(0.0, cfg.sigma_gyro)};
      imu.mag = {std::cos(s.theta) + imu_rng.gaussian(0.0, cfg.sigma_mag),
                 -std::sin(s.theta) + imu_rng.gaussian(0.0, cfg.sigma_mag),
                 imu_rng.gaussian(0.0, cfg.sigma_mag)};
      log.imu.push_back(imu);
    }
  }
  return log;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "paper-5stage", "fig3-10stage", "fig4-radial", "radial-stress", "replay-demo"};
  return names;
}

Scenario get_scenario(const std::string& name, std::uint64_t seed) {
  Scenario sc;
  sc.name = name;
  sc.noise.seed = seed;
  if (name == "paper-5stage" || name == "replay-demo") {
    sc.start = {10.0, 0.0, wrap_angle(1.0471975511965976), 0.0, 0.0};  // 60 deg
    sc.stages = {
        {8.0, 2.5, 0.0},
        {4.0, 2.0, 0.4},
        {8.0, 3.5, 0.0},
        {4.0, 2.5, -0.45},
        {10.0, 3.0, 0.0},
    };
    sc.anchor = {0.0, 0.0};
    sc.noise.sigma_r = 0.2;
    sc.noise.sigma_theta = 0.1;
    sc.range_rate = 10.0;
    sc.heading_rate = 100.0;
    sc.with_imu = (name == "replay-demo");
    sc.tracker.th_distance = 1.0;
  } else if (name == "fig3-10stage") {
    // One straight line, ten constant-speed stages; the speed steps at each
    // boundary produce the characteristic estimator peaks.
    sc.start = {10.0, 0.0, wrap_angle(0.4363323129985824), 0.0, 0.0};  // 25 deg
    sc.stages = {
        {6.0, 1.0, 0.0}, {6.0, 2.5, 0.0}, {8.0, 0.5, 0.0}, {5.0, 4.0, 0.0},
        {6.0, 1.5, 0.0}, {5.0, 6.0, 0.0}, {6.0, 2.0, 0.0}, {5.0, 8.0, 0.0},
        {6.0, 3.0, 0.0}, {5.0, 10.0, 0.0},
    };
    sc.anchor = {0.0, 0.0};
    sc.noise.sigma_r = 0.0;
    sc.noise.sigma_theta = 0.0;
    sc.range_rate = 10.0;
    sc.heading_rate = 100.0;
    sc.tracker.th_distance = 0.3;
    sc.tracker.smooth_ranges = false;  // feed raw ranges, as in the clean demo
  } else if (name == "fig4-radial") {
    // 10 m/s run from (10,0) to (10,250); ranging at the integration step.
    sc.start = {10.0, 0.0, wrap_angle(kPi / 2.0), 0.0, 0.0};
    sc.stages = {{25.0, 10.0, 0.0}};
    sc.anchor = {0.0, 0.0};
    sc.noise.sigma_r = 0.2;
    sc.noise.sigma_theta = 0.1;
    sc.range_rate = 100.0;
    sc.heading_rate = 100.0;
    sc.tracker.th_distance = 6.0;
  } else if (name == "radial-stress") {
    // Outbound exactly along the anchor ray, then a turn and an oblique leg.
    sc.start = {3.0, 0.0, 0.0, 0.0, 0.0};
    sc.stages = {
        {10.0, 2.0, 0.0},
        {4.0, 2.0, 0.4},
        {8.0, 2.0, 0.0},
    };
    sc.anchor = {0.0, 0.0};
    sc.noise.sigma_r = 0.2;
    sc.noise.sigma_theta = 0.1;
    sc.range_rate = 10.0;
    sc.heading_rate = 100.0;
    sc.tracker.th_distance = 1.0;
  } else {
    throw std::invalid_argument("unknown scenario: " + name);
  }
  sc.tracker.sigma_r_meas = sc.noise.sigma_r > 0.0 ? sc.noise.sigma_r : 0.05;
  sc.tracker.sigma_theta_meas = sc.noise.sigma_theta > 0.0 ? sc.noise.sigma_theta : 0.02;
  return sc;
}

std::pair<TruthTrack, SensorLog> simulate_scenario(const Scenario& scenario) {
  TruthTrack truth = integrate_stages(scenario.start, scenario.stages, scenario.step);
  SensorLog log = sensorize(truth, scenario.anchor, scenario.noise,
                            scenario.range_rate, scenario.heading_rate,
                            scenario.with_imu);
  log.meta.scenario = scenario.name;
  log.meta.stages = scenario.stages;
  log.meta.step = scenario.step;
  return {std::move(truth), std::move(log)};
}

std::pair<TruthTrack, SensorLog> paper_scenario_sim(std::uint64_t seed) {
  return simulate_scenario(get_scenario("paper-5stage", seed));
}

}  // namespace uwb1a
