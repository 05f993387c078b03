#include "flexpath/discretize/fpd.hpp"

#include <cmath>
#include <sstream>

namespace flexpath::discretize {

namespace {

bool same_velocity(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double scale = std::max(a.norm(), b.norm());
  return ((a - b).cwiseAbs().array() <= kRelTol * scale + kAbsTol).all();
}

}  // namespace

PiecewiseTrajectory expand_fpd(const FpdPath& path, double delta_max) {
  if (path.j == 0) throw Error("J must be at least 1");
  if (path.designable.size() != path.durations.size() + 1) {
    throw DimensionError("FPD path needs L+1 designable waypoints for L durations");
  }
  const double jd = static_cast<double>(path.j);
  PiecewiseTrajectory out;
  out.waypoints.reserve(path.short_segments() + 1);
  out.durations.reserve(path.short_segments());
  out.waypoints.push_back(path.designable.front());
  for (std::size_t l = 1; l < path.designable.size(); ++l) {
    const Eigen::Vector3d a = path.designable[l - 1].vec();
    const Eigen::Vector3d b = path.designable[l].vec();
    const double length = (b - a).norm();
    if (std::isfinite(delta_max) && !leq_tol(length, jd * delta_max)) {
      std::ostringstream os;
      os << "long-segment " << l << " has length " << length << " m > J*delta_max = " << jd * delta_max << " m";
      throw DiscretizationError(os.str());
    }
    for (std::size_t k = 1; k < path.j; ++k) {
      out.waypoints.emplace_back(a + (static_cast<double>(k) / jd) * (b - a));
    }
    out.waypoints.push_back(path.designable[l]);
    for (std::size_t k = 0; k < path.j; ++k) out.durations.push_back(path.durations[l - 1] / jd);
  }
  return out;
}

PiecewiseTrajectory compress_constant_velocity_runs(const PiecewiseTrajectory& traj, double max_merged_length) {
  const auto velocities = segment_velocities(traj);
  PiecewiseTrajectory out;
  if (traj.waypoints.empty()) return out;
  out.waypoints.push_back(traj.waypoints.front());
  std::size_t n = 0;
  while (n < velocities.size()) {
    double length = traj.segment_length(n);
    double duration = traj.durations[n];
    std::size_t end = n + 1;
    while (end < velocities.size() && same_velocity(velocities[n], velocities[end]) &&
           leq_tol(length + traj.segment_length(end), max_merged_length)) {
      length += traj.segment_length(end);
      duration += traj.durations[end];
      ++end;
    }
    out.waypoints.push_back(traj.waypoints[end]);
    out.durations.push_back(duration);
    n = end;
  }
  return out;
}

FpdPath to_fpd_path(const PiecewiseTrajectory& traj, std::size_t j, double delta_max) {
  if (j == 0) throw Error("J must be at least 1");
  const auto merged = compress_constant_velocity_runs(traj, static_cast<double>(j) * delta_max);
  return FpdPath{merged.waypoints, merged.durations, j};
}

}  // namespace flexpath::discretize
