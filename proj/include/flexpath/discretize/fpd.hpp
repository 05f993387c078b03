#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "flexpath/core/model.hpp"

namespace flexpath::discretize {

/// Flexible path discretization: L+1 designable waypoints, one duration per
/// long-segment, each long-segment split into J equal short-segments.
struct FpdPath {
  std::vector<Position3> designable;  // L + 1
  std::vector<double> durations;      // L
  std::size_t j = 1;

  std::size_t long_segments() const { return durations.size(); }
  std::size_t short_segments() const { return durations.size() * j; }
};

/// Inserts the J-1 interpolated waypoints of every long-segment; short
/// durations are t_l / J. Throws DiscretizationError when a long-segment is
/// longer than J * delta_max (pass infinity to skip the check).
PiecewiseTrajectory expand_fpd(const FpdPath& path,
                               double delta_max = std::numeric_limits<double>::infinity());

/// Merges maximal runs of equal-velocity segments while the merged length
/// stays within `max_merged_length`. The result describes the same q(t).
/// Use delta_max to target CPD, J * delta_max to target FPD long-segments.
PiecewiseTrajectory compress_constant_velocity_runs(
    const PiecewiseTrajectory& traj, double max_merged_length = std::numeric_limits<double>::infinity());

/// Merge with cap J * delta_max and read the result as an FPD path.
FpdPath to_fpd_path(const PiecewiseTrajectory& traj, std::size_t j, double delta_max);

}  // namespace flexpath::discretize
