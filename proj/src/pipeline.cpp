#include "uwb1a/pipeline.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "uwb1a/fusion_ekf.hpp"
#include "uwb1a/orientation_filter.hpp"
#include "uwb1a/range_smoother.hpp"
#include "uwb1a/speed_estimator.hpp"

namespace uwb1a {

namespace {

enum class EventKind { Range = 0, Imu = 1, Heading = 2 };

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::Range;
  std::size_t index = 0;  // into the originating stream
};

template <typename T>
void check_stream_order(const std::vector<T>& stream, const char* name) {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (!(stream[i].t > stream[i - 1].t)) {
      throw std::invalid_argument(std::string("run_pipeline: ") + name +
                                  " stream out of order at index " + std::to_string(i));
    }
  }
}

std::vector<Event> merge_events(const SensorLog& log) {
  check_stream_order(log.ranges, "range");
  check_stream_order(log.headings, "heading");
  check_stream_order(log.imu, "imu");
  std::vector<Event> events;
  events.reserve(log.ranges.size() + log.headings.size() + log.imu.size());
  for (std::size_t i = 0; i < log.ranges.size(); ++i) {
    events.push_back({log.ranges[i].t, EventKind::Range, i});
  }
  for (std::size_t i = 0; i < log.imu.size(); ++i) {
    events.push_back({log.imu[i].t, EventKind::Imu, i});
  }
  for (std::size_t i = 0; i < log.headings.size(); ++i) {
    events.push_back({log.headings[i].t, EventKind::Heading, i});
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return events;
}

}  // namespace

bool linear_motion_gate(double gyro_z, double th) {
  if (!std::isfinite(gyro_z) || !std::isfinite(th)) {
    throw std::invalid_argument("linear_motion_gate: non-finite input");
  }
  return std::abs(gyro_z) < th;
}

PipelineResult run_pipeline(const SensorLog& log, const EstimatorConfig& cfg,
                            TrackMode mode) {
  cfg.validate();
  if (log.ranges.empty()) {
    throw std::invalid_argument("run_pipeline: log has no range samples");
  }
  const bool direct_heading = !log.headings.empty();
  const bool have_imu = !log.imu.empty();
  if (!direct_heading && !have_imu) {
    throw std::invalid_argument("run_pipeline: log has no heading source");
  }

  const std::vector<Event> events = merge_events(log);

  PipelineResult out;
  out.track.samples.reserve(log.ranges.size() + log.headings.size());

  RangeSmoother smoother(cfg);
  SpeedEstimator estimator(cfg);
  AttitudeState attitude;  // used when heading comes from the IMU

  std::optional<EkfBelief> belief;
  std::optional<double> pending_range;       // first range, waiting for a heading
  double pending_range_t = 0.0;
  std::optional<double> latest_heading;      // most recent heading measurement
  double gyro_signal = 0.0;                  // raw gyro z, or EMA of the EKF's w
  double ema_t = 0.0;
  bool have_ema = false;

  auto heading_of_imu = [&](const ImuSample& s, double dt) {
    attitude = attitude_update(attitude, s, dt);
    return heading_from_quaternion(attitude.q).theta;
  };

  auto predict_to = [&](double t) {
    const double dt = t - belief->t;
    if (dt > 0.0) *belief = ekf_predict(*belief, dt, cfg);
  };

  auto update_gate_signal = [&](double t) {
    if (have_imu) return;  // raw gyro drives the gate
    if (!have_ema) {
      gyro_signal = belief->mean.w;
      ema_t = t;
      have_ema = true;
      return;
    }
    const double dt = t - ema_t;
    if (dt > 0.0) {
      const double alpha = 1.0 - std::exp(-dt / cfg.gate_tau);
      gyro_signal += alpha * (belief->mean.w - gyro_signal);
      ema_t = t;
    }
  };

  auto append_sample = [&](double t, bool corrected) {
    PoseSample ps;
    ps.t = t;
    ps.state = belief->mean;
    for (int i = 0; i < 5; ++i) ps.cov_diag[static_cast<std::size_t>(i)] = belief->P(i, i);
    ps.speed_corrected = corrected;
    out.track.samples.push_back(ps);
  };

  double last_imu_t = 0.0;
  bool have_imu_t = false;

  for (const Event& ev : events) {
    switch (ev.kind) {
      case EventKind::Imu: {
        const ImuSample& s = log.imu[ev.index];
        gyro_signal = s.gyro[2];
        if (!direct_heading) {
          const double dt = have_imu_t ? s.t - last_imu_t : 0.01;
          if (dt > 0.0) {
            const double theta = heading_of_imu(s, dt);
            latest_heading = theta;
            if (belief) {
              predict_to(s.t);
              *belief = ekf_update_heading(*belief, theta, cfg.sigma_theta_meas);
              append_sample(s.t, false);
            } else if (pending_range) {
              belief = ekf_init(*pending_range, theta, cfg,
                                std::max(pending_range_t, s.t));
              pending_range.reset();
              append_sample(belief->t, false);
            }
          }
        }
        last_imu_t = s.t;
        have_imu_t = true;
        break;
      }
      case EventKind::Heading: {
        const HeadingSample& s = log.headings[ev.index];
        latest_heading = s.theta;
        if (belief) {
          predict_to(s.t);
          *belief = ekf_update_heading(*belief, s.theta, cfg.sigma_theta_meas);
          update_gate_signal(s.t);
          append_sample(s.t, false);
        } else if (pending_range) {
          belief = ekf_init(*pending_range, s.theta, cfg,
                            std::max(pending_range_t, s.t));
          pending_range.reset();
          update_gate_signal(belief->t);
          append_sample(belief->t, false);
        }
        break;
      }
      case EventKind::Range: {
        const RangeSample& s = log.ranges[ev.index];
        if (!belief) {
          if (latest_heading) {
            belief = ekf_init(s.r, *latest_heading, cfg, s.t);
          } else {
            pending_range = s.r;
            pending_range_t = s.t;
            smoother.step(s);
            break;
          }
          smoother.step(s);
          update_gate_signal(s.t);
          append_sample(s.t, false);
          break;
        }

        predict_to(s.t);
        auto res = ekf_update_range(*belief, s.r, log.meta.anchor, cfg.sigma_r_meas);
        *belief = res.belief;
        if (!res.applied) ++out.skipped_range_updates;

        const double smoothed = smoother.step(s);
        update_gate_signal(s.t);

        bool corrected = false;
        if (mode == TrackMode::WithSpeedEstimator) {
          if (!linear_motion_gate(gyro_signal, cfg.th_linear_motion)) {
            // Turning breaks the straight-line constant-speed assumption;
            // drop accumulated keys and the speed window.
            estimator.flush();
          } else if (estimator.should_trigger(smoothed)) {
            auto est = estimator.offer(smoothed, s.t);
            if (est) {
              bool blended = false;
              if (!est->stale) {
                const double w = cfg.variance_weighted_blend
                                     ? belief->P(3, 3) / (belief->P(3, 3) + est->var_v)
                                     : cfg.blend_w;
                *belief = ekf_blend_speed(*belief, *est, w);
                corrected = true;
                blended = true;
                ++out.blend_count;
              }
              out.speed_trace.push_back({s.t, est->raw_v, est->v, blended, est->stale});
            }
          }
        }
        append_sample(s.t, corrected);
        break;
      }
    }
  }

  if (!belief) {
    throw std::invalid_argument("run_pipeline: no usable initialization events");
  }
  out.failed_solves = estimator.failed_solves();
  out.smoother_outliers = smoother.outliers();
  return out;
}

std::vector<SpeedTracePoint> run_speed_trace(const SensorLog& log,
                                             const EstimatorConfig& cfg) {
  cfg.validate();
  RangeSmoother smoother(cfg);
  SpeedEstimator estimator(cfg);
  std::vector<SpeedTracePoint> trace;
  for (const RangeSample& s : log.ranges) {
    const double r = cfg.smooth_ranges ? smoother.step(s) : s.r;
    auto est = estimator.offer(r, s.t);
    if (est) {
      trace.push_back({s.t, est->raw_v, est->v, false, est->stale});
    }
  }
  return trace;
}

}  // namespace uwb1a
