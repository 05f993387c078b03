#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flexpath/core/errors.hpp"

namespace flexpath {

/// Feasibility tolerances shared by every check in the toolkit.
inline constexpr double kRelTol = 1e-9;
inline constexpr double kAbsTol = 1e-12;

/// True when `value <= bound` up to the shared relative/absolute tolerance.
inline bool leq_tol(double value, double bound) {
  return value <= bound + kRelTol * std::abs(bound) + kAbsTol;
}

/// Cartesian position in meters.
struct Position3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Position3() = default;
  Position3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
  explicit Position3(const Eigen::Vector3d& v) : x(v.x()), y(v.y()), z(v.z()) {}

  Eigen::Vector3d vec() const { return {x, y, z}; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  bool operator==(const Position3&) const = default;
};

inline double distance(const Position3& a, const Position3& b) { return (a.vec() - b.vec()).norm(); }
inline double horizontal_distance(const Position3& a, const Position3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Environment and UAV physics. All quantities are linear SI units.
struct Scenario {
  std::vector<Position3> sensors;
  std::vector<double> tx_powers;  // W, one per sensor
  double beta0 = 1e-6;            // channel power gain at 1 m
  double noise_power = 1e-9;      // W
  double h_min = 100.0;           // m
  double v_max = 20.0;            // m/s
  double period = 100.0;          // s
  Position3 q_start{0.0, 0.0, 100.0};
  Position3 q_end{0.0, 0.0, 100.0};
  double epsilon_robust = 0.0;

  std::size_t sensor_count() const { return sensors.size(); }

  /// Receive SNR at 1 m for sensor `s`, P_s * beta0 / sigma^2.
  double snr_scale(std::size_t s) const { return tx_powers.at(s) * beta0 / noise_power; }

  /// Throws ConfigError naming the first broken invariant.
  void validate() const;
};

/// Ordered waypoints with a duration per connecting segment.
struct PiecewiseTrajectory {
  std::vector<Position3> waypoints;  // N + 1
  std::vector<double> durations;     // N, seconds

  std::size_t segment_count() const { return durations.size(); }
  double total_duration() const;
  double segment_length(std::size_t n) const { return distance(waypoints.at(n), waypoints.at(n + 1)); }
  double max_segment_length() const;
  /// Position at time t in [0, total_duration()], piecewise-linear.
  Position3 position_at(double t) const;
};

/// Relaxed TDMA allocation: rows are sensors, columns are (short-)segments.
struct Schedule {
  Eigen::MatrixXd alpha;

  static Schedule uniform(std::size_t sensors, std::size_t segments);
  static Schedule constant(std::size_t sensors, std::size_t segments, double value);
  std::size_t sensor_count() const { return static_cast<std::size_t>(alpha.rows()); }
  std::size_t segment_count() const { return static_cast<std::size_t>(alpha.cols()); }
  /// True when entries lie in [0,1] and column sums are <= 1, both within 1e-9.
  bool valid() const;
};

/// Constant velocity of every segment, (q_n - q_{n-1}) / t_n.
std::vector<Eigen::Vector3d> segment_velocities(const PiecewiseTrajectory& traj);

/// log2(1 + p_tx * beta0 / (|q - w|^2 * noise)), in bps/Hz.
double spectral_efficiency(const Position3& q, const Position3& w, double p_tx, double beta0, double noise);

enum class ViolationKind {
  kMalformed,
  kNonPositiveDuration,
  kPeriodExceeded,
  kSpeed,
  kAltitude,
  kStartPoint,
  kEndPoint,
  kNonFinite,
};

struct Violation {
  ViolationKind kind;
  std::size_t index = 0;  // segment or waypoint index where meaningful
  std::string message;
};

std::string to_string(ViolationKind kind);

/// Every broken trajectory invariant; empty means feasible. The altitude check
/// applies when `fixed_altitude` is set (the case-study setting).
std::vector<Violation> validate_trajectory(const PiecewiseTrajectory& traj, const Scenario& scenario,
                                           bool fixed_altitude = true);

}  // namespace flexpath
