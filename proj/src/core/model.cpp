#include "flexpath/core/model.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace flexpath {

namespace {

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os << what << " (got " << value << ")";
  return os.str();
}

}  // namespace

void Scenario::validate() const {
  if (sensors.empty()) throw ConfigError("scenario needs at least one sensor");
  if (tx_powers.size() != sensors.size()) {
    throw ConfigError("tx_powers must have one entry per sensor");
  }
  for (std::size_t s = 0; s < sensors.size(); ++s) {
    if (!sensors[s].finite()) throw ConfigError("sensor position is not finite");
    if (!(tx_powers[s] > 0.0)) throw ConfigError(describe("transmit powers must be positive", tx_powers[s]));
  }
  if (!(beta0 > 0.0)) throw ConfigError(describe("beta0 must be positive", beta0));
  if (!(noise_power > 0.0)) throw ConfigError(describe("noise power must be positive", noise_power));
  if (!(h_min > 0.0)) throw ConfigError(describe("h_min must be positive", h_min));
  if (!(v_max > 0.0)) throw ConfigError(describe("v_max must be positive", v_max));
  if (!(period > 0.0)) throw ConfigError(describe("period must be positive", period));
  if (!(epsilon_robust >= 0.0)) throw ConfigError(describe("epsilon_robust must be >= 0", epsilon_robust));
  if (!q_start.finite() || !q_end.finite()) throw ConfigError("start/end positions must be finite");
  if (q_start.z < 0.0 || q_end.z < 0.0) throw ConfigError("start/end altitude must be >= 0");
  const double min_period = distance(q_start, q_end) / v_max;
  if (!leq_tol(min_period, period)) {
    throw ConfigError(describe("period is shorter than the straight-line flight time", period));
  }
}

double PiecewiseTrajectory::total_duration() const {
  return std::accumulate(durations.begin(), durations.end(), 0.0);
}

double PiecewiseTrajectory::max_segment_length() const {
  double longest = 0.0;
  for (std::size_t n = 0; n < segment_count(); ++n) longest = std::max(longest, segment_length(n));
  return longest;
}

Position3 PiecewiseTrajectory::position_at(double t) const {
  if (waypoints.empty()) throw DimensionError("trajectory has no waypoints");
  double elapsed = 0.0;
  for (std::size_t n = 0; n < segment_count(); ++n) {
    const double dt = durations[n];
    if (t <= elapsed + dt || n + 1 == segment_count()) {
      const double frac = dt > 0.0 ? std::clamp((t - elapsed) / dt, 0.0, 1.0) : 1.0;
      return Position3(waypoints[n].vec() + frac * (waypoints[n + 1].vec() - waypoints[n].vec()));
    }
    elapsed += dt;
  }
  return waypoints.back();
}

Schedule Schedule::uniform(std::size_t sensors, std::size_t segments) {
  return constant(sensors, segments, sensors == 0 ? 0.0 : 1.0 / static_cast<double>(sensors));
}

Schedule Schedule::constant(std::size_t sensors, std::size_t segments, double value) {
  Schedule out;
  out.alpha = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(sensors), static_cast<Eigen::Index>(segments), value);
  return out;
}

bool Schedule::valid() const {
  if (!alpha.allFinite()) return false;
  if (alpha.size() > 0 && (alpha.minCoeff() < -kRelTol || alpha.maxCoeff() > 1.0 + kRelTol)) return false;
  for (Eigen::Index n = 0; n < alpha.cols(); ++n) {
    if (alpha.col(n).sum() > 1.0 + kRelTol) return false;
  }
  return true;
}

std::vector<Eigen::Vector3d> segment_velocities(const PiecewiseTrajectory& traj) {
  if (traj.waypoints.size() != traj.durations.size() + 1) {
    throw DimensionError("trajectory needs exactly one more waypoint than durations");
  }
  std::vector<Eigen::Vector3d> out;
  out.reserve(traj.segment_count());
  for (std::size_t n = 0; n < traj.segment_count(); ++n) {
    const double dt = traj.durations[n];
    if (!(dt > 0.0)) {
      std::ostringstream os;
      os << "segment " << n << " has non-positive duration " << dt;
      throw DegenerateSegmentError(os.str());
    }
    out.emplace_back((traj.waypoints[n + 1].vec() - traj.waypoints[n].vec()) / dt);
  }
  return out;
}

double spectral_efficiency(const Position3& q, const Position3& w, double p_tx, double beta0, double noise) {
  if (p_tx == 0.0) return 0.0;
  const double d2 = (q.vec() - w.vec()).squaredNorm();
  if (d2 == 0.0) throw InfiniteRateError("receiver coincides with the transmitter");
  return std::log2(1.0 + p_tx * beta0 / (d2 * noise));
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kMalformed: return "malformed";
    case ViolationKind::kNonPositiveDuration: return "non_positive_duration";
    case ViolationKind::kPeriodExceeded: return "period_exceeded";
    case ViolationKind::kSpeed: return "speed";
    case ViolationKind::kAltitude: return "altitude";
    case ViolationKind::kStartPoint: return "start_point";
    case ViolationKind::kEndPoint: return "end_point";
    case ViolationKind::kNonFinite: return "non_finite";
  }
  return "unknown";
}

std::vector<Violation> validate_trajectory(const PiecewiseTrajectory& traj, const Scenario& scenario,
                                           bool fixed_altitude) {
  std::vector<Violation> out;
  auto add = [&out](ViolationKind kind, std::size_t index, std::string msg) {
    out.push_back({kind, index, std::move(msg)});
  };
  if (traj.waypoints.empty() || traj.waypoints.size() != traj.durations.size() + 1) {
    add(ViolationKind::kMalformed, 0, "waypoint count must equal duration count + 1");
    return out;
  }
  for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
    const auto& q = traj.waypoints[i];
    if (!q.finite()) add(ViolationKind::kNonFinite, i, "waypoint has non-finite coordinates");
    if (fixed_altitude && std::abs(q.z - scenario.h_min) > kRelTol * scenario.h_min + kAbsTol) {
      add(ViolationKind::kAltitude, i, describe("waypoint altitude differs from h_min", q.z));
    }
  }
  for (std::size_t n = 0; n < traj.segment_count(); ++n) {
    const double dt = traj.durations[n];
    if (!(dt > 0.0)) {
      add(ViolationKind::kNonPositiveDuration, n, describe("segment duration must be positive", dt));
      continue;
    }
    const double speed = traj.segment_length(n) / dt;
    if (!leq_tol(speed, scenario.v_max)) add(ViolationKind::kSpeed, n, describe("segment speed exceeds v_max", speed));
  }
  const double total = traj.total_duration();
  if (!leq_tol(total, scenario.period)) add(ViolationKind::kPeriodExceeded, 0, describe("durations exceed the period", total));

  auto close = [](const Position3& a, const Position3& b) {
    const double scale = std::max(a.vec().norm(), b.vec().norm());
    return distance(a, b) <= kRelTol * scale + kAbsTol;
  };
  if (!close(traj.waypoints.front(), scenario.q_start)) add(ViolationKind::kStartPoint, 0, "first waypoint is not q_start");
  if (!close(traj.waypoints.back(), scenario.q_end)) {
    add(ViolationKind::kEndPoint, traj.waypoints.size() - 1, "last waypoint is not q_end");
  }
  return out;
}

}  // namespace flexpath
