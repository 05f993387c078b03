#pragma once

#include "flexpath/core/model.hpp"
#include "flexpath/discretize/fpd.hpp"
#include "flexpath/kernels/rate_kernels.hpp"

namespace flexpath::discretize {

inline constexpr int kDefaultOracleSubsteps = 1000;

kernels::SensorField sensor_field(const Scenario& scenario);

/// Terminal waypoint of every segment (q_1 ... q_N) as a 3 x N matrix.
Eigen::Matrix3Xd evaluation_points(const PiecewiseTrajectory& traj);

/// Per-sensor finite-sum rates (1/T) sum_n alpha_{s,n} t_n log2(1 + gamma_s/|q_n - w_s|^2),
/// evaluated at each segment's terminal waypoint.
Eigen::VectorXd finite_sum_rates(const PiecewiseTrajectory& traj, const Scenario& scenario,
                                 const Schedule& schedule);

/// Reference value of the continuous-time average rates by composite midpoint
/// quadrature (`substeps` >= 100 nodes per segment).
Eigen::VectorXd oracle_integrate_rates(const PiecewiseTrajectory& traj, const Scenario& scenario,
                                       const Schedule& schedule, int substeps = kDefaultOracleSubsteps);

/// FPD utility evaluated straight from the designable waypoints:
/// (1/T) sum_l (t_l/J) sum_j alpha_{s,(l,j)} u(q_{l-1} + j (q_l - q_{l-1}) / J).
Eigen::VectorXd fpd_rates_direct(const FpdPath& path, const Scenario& scenario, const Schedule& schedule);

}  // namespace flexpath::discretize
