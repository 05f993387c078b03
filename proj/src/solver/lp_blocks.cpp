#include <algorithm>
#include <cmath>

#include "flexpath/core/errors.hpp"
#include "flexpath/discretize/rates.hpp"
#include "flexpath/kernels/rate_kernels.hpp"
#include "flexpath/solver/solver.hpp"
#include "internal.hpp"

namespace flexpath::solver {

namespace {

// Clamp to [0,1] and rescale columns whose sum exceeds 1.
void repair_schedule(Eigen::MatrixXd& alpha) {
  alpha = alpha.cwiseMax(0.0).cwiseMin(1.0);
  for (Eigen::Index n = 0; n < alpha.cols(); ++n) {
    const double sum = alpha.col(n).sum();
    if (sum > 1.0) alpha.col(n) /= sum;
  }
}

}  // namespace

ScheduleResult solve_schedule(const Eigen::MatrixXd& rates, const Eigen::VectorXd& durations, double period,
                              const conic::ConeSolver& backend, const conic::SolverSettings& settings) {
  const Eigen::Index s_count = rates.rows();
  const Eigen::Index n_count = rates.cols();
  if (durations.size() != n_count) throw DimensionError("schedule LP needs one duration per segment");
  if ((rates.array() < 0.0).any()) throw Error("schedule LP needs nonnegative rates");
  ScheduleResult out;
  if (s_count == 0) {
    out.schedule.alpha.resize(0, n_count);
    return out;
  }
  const Eigen::MatrixXd w = rates.array().rowwise() * (durations.transpose().array() / period);
  const Eigen::VectorXd totals = w.rowwise().sum();
  if (s_count == 1) {
    out.schedule = Schedule::constant(1, static_cast<std::size_t>(n_count), 1.0);
    out.objective = totals(0);
    return out;
  }
  if (!(totals.minCoeff() > 0.0)) {
    out.schedule = Schedule::uniform(static_cast<std::size_t>(s_count), static_cast<std::size_t>(n_count));
    out.objective = 0.0;
    return out;
  }
  const double rho = totals.maxCoeff();
  const Eigen::Index eta = s_count * n_count;
  auto var = [n_count](Eigen::Index s, Eigen::Index n) { return s * n_count + n; };

  conic::ConeProgramBuilder b(eta + 1);
  b.set_objective(eta, -1.0);
  for (Eigen::Index s = 0; s < s_count; ++s) {
    std::vector<conic::Term> terms{{eta, 1.0}};
    for (Eigen::Index n = 0; n < n_count; ++n) {
      if (w(s, n) > 0.0) terms.emplace_back(var(s, n), -w(s, n) / rho);
    }
    b.add_inequality(terms, 0.0);
  }
  for (Eigen::Index n = 0; n < n_count; ++n) {
    std::vector<conic::Term> terms;
    for (Eigen::Index s = 0; s < s_count; ++s) terms.emplace_back(var(s, n), 1.0);
    b.add_inequality(terms, 1.0);
  }
  for (Eigen::Index i = 0; i < eta; ++i) b.add_inequality({{i, -1.0}}, 0.0);

  const auto res = backend.solve(b.build(), settings);
  detail::require_usable(res, "schedule LP");
  Eigen::MatrixXd alpha(s_count, n_count);
  for (Eigen::Index s = 0; s < s_count; ++s) {
    for (Eigen::Index n = 0; n < n_count; ++n) alpha(s, n) = res.x(var(s, n));
  }
  repair_schedule(alpha);
  out.schedule.alpha = alpha;
  out.objective = (alpha.cwiseProduct(w)).rowwise().sum().minCoeff();
  return out;
}

DurationResult solve_durations(const Eigen::MatrixXd& coeffs, const Eigen::VectorXd& lower, double period,
                               const conic::ConeSolver& backend, const conic::SolverSettings& settings) {
  const Eigen::Index l_count = coeffs.cols();
  if (lower.size() != l_count) throw DimensionError("duration LP needs one lower bound per segment");
  const double floor_sum = lower.sum();
  if (floor_sum > period * (1.0 + kRelTol)) {
    throw InfeasibleError("minimum flight times exceed the period (" + std::to_string(floor_sum) + " s > " +
                          std::to_string(period) + " s)");
  }
  auto evaluate = [&](const Eigen::VectorXd& t) {
    return coeffs.rows() ? (coeffs * t).minCoeff() / period : 0.0;
  };
  DurationResult out;
  const double slack = period - floor_sum;
  if (slack <= kRelTol * period) {
    out.durations = lower * std::min(1.0, period / floor_sum);
    out.objective = evaluate(out.durations);
    return out;
  }
  const double rho = coeffs.size() ? coeffs.maxCoeff() : 0.0;
  if (!(rho > 0.0)) {
    out.durations = lower.array() + slack / static_cast<double>(l_count);
    out.objective = evaluate(out.durations);
    return out;
  }

  const Eigen::Index eta = l_count;
  conic::ConeProgramBuilder b(l_count + 1);
  b.set_objective(eta, -1.0);
  for (Eigen::Index s = 0; s < coeffs.rows(); ++s) {
    std::vector<conic::Term> terms{{eta, 1.0}};
    for (Eigen::Index l = 0; l < l_count; ++l) {
      if (coeffs(s, l) > 0.0) terms.emplace_back(l, -coeffs(s, l) / rho);
    }
    b.add_inequality(terms, 0.0);
  }
  std::vector<conic::Term> total;
  for (Eigen::Index l = 0; l < l_count; ++l) {
    b.add_inequality({{l, -1.0}}, -lower(l) / period);
    total.emplace_back(l, 1.0);
  }
  b.add_inequality(total, 1.0);

  const auto res = backend.solve(b.build(), settings);
  detail::require_usable(res, "duration LP");
  Eigen::VectorXd t = (res.x.head(l_count) * period).cwiseMax(lower);
  const double sum = t.sum();
  if (sum > period) t = lower + (t - lower) * (slack / (sum - floor_sum));
  out.durations = t;
  out.objective = evaluate(t);
  return out;
}

DurationResult solve_durations(const ProblemSpec& spec, const Design& design, const Schedule& schedule,
                               const conic::ConeSolver& backend) {
  if (spec.scheme.fixed_durations()) throw Error("TD durations are fixed by the slot grid");
  const auto& path = design.path;
  const auto l_count = static_cast<Eigen::Index>(path.long_segments());
  const auto j = static_cast<Eigen::Index>(path.j);
  const PiecewiseTrajectory traj = expand(spec, design);
  const Eigen::MatrixXd se =
      kernels::parallel::spectral_matrix(discretize::sensor_field(spec.scenario), discretize::evaluation_points(traj));
  if (schedule.alpha.rows() != se.rows() || schedule.alpha.cols() != se.cols()) {
    throw DimensionError("schedule does not match the short-segment count");
  }
  const Eigen::MatrixXd weighted = schedule.alpha.cwiseProduct(se);
  Eigen::MatrixXd coeffs(se.rows(), l_count);
  for (Eigen::Index l = 0; l < l_count; ++l) {
    coeffs.col(l) = weighted.middleCols(l * j, j).rowwise().sum() / static_cast<double>(j);
  }
  Eigen::VectorXd lower(l_count);
  const double eps = spec.scenario.epsilon_robust;
  for (Eigen::Index l = 0; l < l_count; ++l) {
    const double len = distance(path.designable[static_cast<std::size_t>(l)], path.designable[static_cast<std::size_t>(l + 1)]);
    lower(l) = std::max(len * (1.0 + eps) / spec.scenario.v_max, detail::kMinDuration);
  }
  return solve_durations(coeffs, lower, spec.scenario.period, backend, spec.config.conic_settings());
}

}  // namespace flexpath::solver
