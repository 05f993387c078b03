#pragma once

#include <Eigen/Dense>

#include "flexpath/conic/cone_program.hpp"
#include "flexpath/solver/problem.hpp"

namespace flexpath::solver {

/// Feasible starting point: circle (closed missions) or straight line,
/// uniform durations, alpha = 1/S. Throws InfeasibleError when no such point fits.
Design initialize(const ProblemSpec& spec);

/// Expanded trajectory of a design.
PiecewiseTrajectory expand(const ProblemSpec& spec, const Design& design);

/// Per-sensor finite-sum rates of a design under `schedule`.
Eigen::VectorXd design_rates(const ProblemSpec& spec, const Design& design, const Schedule& schedule);

/// Min over sensors, 0 for an empty scenario.
double min_rate(const Eigen::VectorXd& rates);

struct ScheduleResult {
  Schedule schedule;
  double objective = 0.0;
};

/// Max-min LP over alpha: max_alpha min_s sum_n alpha(s,n) t_n r(s,n) / T with
/// column sums <= 1 and alpha >= 0. `rates` is S x N spectral efficiency.
ScheduleResult solve_schedule(const Eigen::MatrixXd& rates, const Eigen::VectorXd& durations, double period,
                              const conic::ConeSolver& backend, const conic::SolverSettings& settings);

struct DurationResult {
  Eigen::VectorXd durations;
  double objective = 0.0;
};

/// Max-min LP over durations: rate_s = sum_l t_l c(s,l) / T with t >= lower,
/// sum t <= T. Throws InfeasibleError when sum(lower) > T.
DurationResult solve_durations(const Eigen::MatrixXd& coeffs, const Eigen::VectorXd& lower, double period,
                               const conic::ConeSolver& backend, const conic::SolverSettings& settings);

/// Duration block for a design: lower bounds max(|dq_l| (1 + eps) / v_max, 1e-6).
DurationResult solve_durations(const ProblemSpec& spec, const Design& design, const Schedule& schedule,
                               const conic::ConeSolver& backend);

struct StepResult {
  Design design;
  double objective = 0.0;
  bool moved = false;
  conic::SolveStatus status = conic::SolveStatus::kOptimal;
};

/// One SCA step on the designable waypoints (TD, CPD, FPD). The result never
/// has a lower true objective than `current`. Throws SolverError on backend failure.
StepResult sca_waypoint_step(const ProblemSpec& spec, const Design& current, const Schedule& schedule,
                             const conic::ConeSolver& backend);

/// Same step over the FPD-PC coefficient matrix.
StepResult sca_coeff_step(const ProblemSpec& spec, const Design& current, const Schedule& schedule,
                          const conic::ConeSolver& backend);

/// Per-sensor value of the concave surrogate built at `expansion`, evaluated at
/// the terminal points of `probe`. Both trajectories share durations.
Eigen::VectorXd surrogate_rates(const Scenario& scenario, const PiecewiseTrajectory& expansion,
                                const PiecewiseTrajectory& probe, const Schedule& schedule);

/// Block coordinate descent: schedule -> durations -> waypoints (configurable).
Solution bcd_solve(const ProblemSpec& spec);
Solution bcd_solve(const ProblemSpec& spec, const conic::ConeSolver& backend);

}  // namespace flexpath::solver
