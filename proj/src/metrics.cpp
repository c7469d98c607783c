#include "uwb1a/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uwb1a {

namespace {

struct Pair2d {
  double t = 0.0;
  double ex = 0.0, ey = 0.0;  // estimate
  double rx = 0.0, ry = 0.0;  // reference
  double etheta = 0.0, rtheta = 0.0;
};

std::vector<Pair2d> interpolated_pairs(const PoseTrack& est, const TruthTrack& truth) {
  if (est.samples.empty() || truth.empty()) {
    throw std::invalid_argument("metrics: empty track");
  }
  const double lo = truth.t_begin();
  const double hi = truth.t_end();
  std::vector<Pair2d> pairs;
  pairs.reserve(est.samples.size());
  for (const PoseSample& s : est.samples) {
    if (s.t < lo || s.t > hi) continue;
    const RobotState r = truth.interpolate(s.t);
    pairs.push_back({s.t, s.state.x, s.state.y, r.x, r.y, s.state.theta, r.theta});
  }
  if (pairs.empty()) {
    throw std::invalid_argument("metrics: no temporal overlap between tracks");
  }
  return pairs;
}

std::vector<Pair2d> associated_pairs(const PoseTrack& est, const TruthTrack& ref,
                                     double tol) {
  if (est.samples.empty() || ref.empty()) {
    throw std::invalid_argument("metrics: empty track");
  }
  std::vector<Pair2d> pairs;
  for (const PoseSample& s : est.samples) {
    auto it = std::lower_bound(
        ref.samples.begin(), ref.samples.end(), s.t,
        [](const TruthSample& a, double t) { return a.t < t; });
    const TruthSample* best = nullptr;
    if (it != ref.samples.end()) best = &*it;
    if (it != ref.samples.begin()) {
      const TruthSample* prev = &*(it - 1);
      if (!best || std::abs(prev->t - s.t) < std::abs(best->t - s.t)) best = prev;
    }
    if (best && std::abs(best->t - s.t) <= tol) {
      pairs.push_back({s.t, s.state.x, s.state.y, best->state.x, best->state.y,
                       s.state.theta, best->state.theta});
    }
  }
  return pairs;
}

double rms_of_pairs(const std::vector<Pair2d>& pairs) {
  double ss = 0.0;
  for (const Pair2d& p : pairs) {
    const double dx = p.ex - p.rx;
    const double dy = p.ey - p.ry;
    ss += dx * dx + dy * dy;
  }
  return std::sqrt(ss / static_cast<double>(pairs.size()));
}

// Least-squares planar rotation + translation (orthogonal Procrustes)
// mapping the estimate onto the reference.
void align_rigid_2d(std::vector<Pair2d>& pairs) {
  double mex = 0.0, mey = 0.0, mrx = 0.0, mry = 0.0;
  const double n = static_cast<double>(pairs.size());
  for (const Pair2d& p : pairs) {
    mex += p.ex; mey += p.ey; mrx += p.rx; mry += p.ry;
  }
  mex /= n; mey /= n; mrx /= n; mry /= n;
  double sxx = 0.0, sxy = 0.0, syx = 0.0, syy = 0.0;
  for (const Pair2d& p : pairs) {
    const double ax = p.ex - mex, ay = p.ey - mey;
    const double bx = p.rx - mrx, by = p.ry - mry;
    sxx += ax * bx; sxy += ax * by; syx += ay * bx; syy += ay * by;
  }
  const double angle = std::atan2(sxy - syx, sxx + syy);
  const double c = std::cos(angle), s = std::sin(angle);
  for (Pair2d& p : pairs) {
    const double ax = p.ex - mex, ay = p.ey - mey;
    p.ex = c * ax - s * ay + mrx;
    p.ey = s * ax + c * ay + mry;
  }
}

}  // namespace

double rmse(const PoseTrack& est, const TruthTrack& truth) {
  return rms_of_pairs(interpolated_pairs(est, truth));
}

double ate(const PoseTrack& est, const TruthTrack& ref, Alignment align,
           double assoc_tol) {
  auto pairs = associated_pairs(est, ref, assoc_tol);
  if (align == Alignment::Rigid2d) {
    if (pairs.size() < 3) {
      throw std::invalid_argument("ate: rigid alignment needs at least 3 pairs");
    }
    align_rigid_2d(pairs);
  } else if (pairs.empty()) {
    throw std::invalid_argument("ate: no associated pairs");
  }
  return rms_of_pairs(pairs);
}

ErrorSeries windowed_rmse(const PoseTrack& est, const TruthTrack& truth,
                          double window) {
  if (!(window > 0.0)) throw std::invalid_argument("windowed_rmse: window must be > 0");
  return evaluate(est, truth, window);
}

ErrorSeries evaluate(const PoseTrack& est, const TruthTrack& truth, double window,
                     std::optional<Alignment> ate_alignment) {
  if (!(window > 0.0)) throw std::invalid_argument("evaluate: window must be > 0");
  const auto pairs = interpolated_pairs(est, truth);

  ErrorSeries out;
  out.errors.reserve(pairs.size());
  double ss = 0.0;
  double heading_abs = 0.0;
  for (const Pair2d& p : pairs) {
    const double e = std::hypot(p.ex - p.rx, p.ey - p.ry);
    out.errors.push_back({p.t, e});
    ss += e * e;
    out.max_error = std::max(out.max_error, e);
    heading_abs += std::abs(wrap_angle(p.etheta - p.rtheta));
  }
  out.rmse = std::sqrt(ss / static_cast<double>(pairs.size()));
  out.heading_mae = heading_abs / static_cast<double>(pairs.size());

  // Trailing-window RMSE via a two-pointer sweep.
  out.windowed.reserve(pairs.size());
  std::size_t head = 0;
  double wss = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < out.errors.size(); ++i) {
    wss += out.errors[i].value * out.errors[i].value;
    ++count;
    while (out.errors[head].t < out.errors[i].t - window) {
      wss -= out.errors[head].value * out.errors[head].value;
      --count;
      ++head;
    }
    out.windowed.push_back(
        {out.errors[i].t, std::sqrt(std::max(0.0, wss) / static_cast<double>(count))});
  }

  if (ate_alignment) {
    out.ate = ate(est, truth, *ate_alignment);
  }
  return out;
}

}  // namespace uwb1a
