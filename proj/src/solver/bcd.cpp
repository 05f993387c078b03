#include <chrono>
#include <cmath>

#include "flexpath/core/errors.hpp"
#include "flexpath/discretize/rates.hpp"
#include "flexpath/kernels/rate_kernels.hpp"
#include "flexpath/solver/solver.hpp"

namespace flexpath::solver {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool improved_enough(double before, double after, double rel_tol) {
  return after - before > rel_tol * std::max(std::abs(before), 1e-300);
}

}  // namespace

Solution bcd_solve(const ProblemSpec& spec) { return bcd_solve(spec, conic::InteriorPointSolver{}); }

Solution bcd_solve(const ProblemSpec& spec, const conic::ConeSolver& backend) {
  const auto t0 = Clock::now();
  const SolverConfig& cfg = spec.config;
  Design design = initialize(spec);
  const std::size_t sensors = spec.scenario.sensor_count();
  Schedule schedule = Schedule::uniform(sensors, spec.scheme.short_segments());
  double objective = min_rate(design_rates(spec, design, schedule));

  Solution sol;
  sol.design_variables = spec.scheme.design_variables();
  sol.objective_log.push_back(objective);
  int failures_in_row = 0;

  for (int iter = 0; iter < cfg.bcd_max_iters; ++iter) {
    const double start = objective;
    bool failed = false;
    std::string failure;
    for (const Block block : cfg.block_order) {
      try {
        if (block == Block::kSchedule) {
          const PiecewiseTrajectory traj = expand(spec, design);
          const Eigen::MatrixXd se = kernels::parallel::spectral_matrix(discretize::sensor_field(spec.scenario),
                                                                        discretize::evaluation_points(traj));
          const Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(traj.durations.data(),
                                                                      static_cast<Eigen::Index>(traj.durations.size()));
          auto res = solve_schedule(se, t, spec.scenario.period, backend, cfg.conic_settings());
          const double obj = min_rate(design_rates(spec, design, res.schedule));
          if (obj >= objective) {
            schedule = std::move(res.schedule);
            objective = obj;
          }
        } else if (block == Block::kDurations) {
          if (spec.scheme.fixed_durations()) continue;
          const auto res = solve_durations(spec, design, schedule, backend);
          Design cand = design;
          cand.path.durations.assign(res.durations.data(), res.durations.data() + res.durations.size());
          const double obj = min_rate(design_rates(spec, cand, schedule));
          if (obj >= objective) {
            design = std::move(cand);
            objective = obj;
          }
        } else {
          const auto tb = Clock::now();
          ++sol.waypoint_block_calls;
          try {
            for (int k = 0; k < cfg.sca_max_iters; ++k) {
              const double before = objective;
              StepResult step = sca_waypoint_step(spec, design, schedule, backend);
              if (step.moved && step.objective >= objective) {
                design = std::move(step.design);
                objective = step.objective;
              }
              if (!step.moved || !improved_enough(before, objective, cfg.sca_rel_tol)) break;
            }
          } catch (...) {
            sol.waypoint_block_seconds += seconds_since(tb);
            throw;
          }
          sol.waypoint_block_seconds += seconds_since(tb);
        }
      } catch (const SolverError& e) {
        failed = true;
        failure = e.what();
      }
    }
    sol.objective_log.push_back(objective);
    sol.iterations = iter + 1;
    failures_in_row = failed ? failures_in_row + 1 : 0;
    if (failed) sol.status = failure;
    if (!improved_enough(start, objective, cfg.bcd_rel_tol)) break;
  }

  sol.degraded = failures_in_row > 0;
  if (!sol.degraded) sol.status = "converged";
  sol.path = design.path;
  sol.coeffs = design.coeffs;
  sol.trajectory = expand(spec, design);
  sol.schedule = schedule;
  sol.rates = design_rates(spec, design, schedule);
  sol.objective = min_rate(sol.rates);
  if (sol.rates.size()) sol.rates.minCoeff(&sol.min_sensor);
  sol.wall_seconds = seconds_since(t0);
  return sol;
}

}  // namespace flexpath::solver
