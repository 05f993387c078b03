#include "flexpath/discretize/rates.hpp"

#include <cmath>

namespace flexpath::discretize {

kernels::SensorField sensor_field(const Scenario& scenario) {
  kernels::SensorField field;
  const auto count = static_cast<Eigen::Index>(scenario.sensor_count());
  field.positions.resize(3, count);
  field.gamma.resize(count);
  for (Eigen::Index s = 0; s < count; ++s) {
    field.positions.col(s) = scenario.sensors[static_cast<std::size_t>(s)].vec();
    field.gamma(s) = scenario.snr_scale(static_cast<std::size_t>(s));
  }
  return field;
}

Eigen::Matrix3Xd evaluation_points(const PiecewiseTrajectory& traj) {
  Eigen::Matrix3Xd pts(3, static_cast<Eigen::Index>(traj.segment_count()));
  for (std::size_t n = 0; n < traj.segment_count(); ++n) pts.col(static_cast<Eigen::Index>(n)) = traj.waypoints[n + 1].vec();
  return pts;
}

namespace {

void check_schedule(const PiecewiseTrajectory& traj, const Scenario& scenario, const Schedule& schedule) {
  if (traj.waypoints.size() != traj.durations.size() + 1) {
    throw DimensionError("trajectory needs exactly one more waypoint than durations");
  }
  if (schedule.sensor_count() != scenario.sensor_count() || schedule.segment_count() != traj.segment_count()) {
    throw DimensionError("schedule must be sensors x segments");
  }
}

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

Eigen::VectorXd finite_sum_rates(const PiecewiseTrajectory& traj, const Scenario& scenario,
                                 const Schedule& schedule) {
  check_schedule(traj, scenario, schedule);
  const auto field = sensor_field(scenario);
  const Eigen::MatrixXd se = kernels::parallel::spectral_matrix(field, evaluation_points(traj));
  return kernels::parallel::weighted_rates(se, schedule.alpha, as_vector(traj.durations), scenario.period);
}

Eigen::VectorXd oracle_integrate_rates(const PiecewiseTrajectory& traj, const Scenario& scenario,
                                       const Schedule& schedule, int substeps) {
  if (substeps < 100) throw Error("oracle quadrature needs at least 100 substeps per segment");
  check_schedule(traj, scenario, schedule);
  Eigen::Matrix3Xd wp(3, static_cast<Eigen::Index>(traj.waypoints.size()));
  for (std::size_t i = 0; i < traj.waypoints.size(); ++i) wp.col(static_cast<Eigen::Index>(i)) = traj.waypoints[i].vec();
  return kernels::parallel::midpoint_rates(sensor_field(scenario), wp, as_vector(traj.durations), schedule.alpha,
                                           substeps, scenario.period);
}

Eigen::VectorXd fpd_rates_direct(const FpdPath& path, const Scenario& scenario, const Schedule& schedule) {
  if (path.designable.size() != path.durations.size() + 1) throw DimensionError("malformed FPD path");
  if (schedule.sensor_count() != scenario.sensor_count() || schedule.segment_count() != path.short_segments()) {
    throw DimensionError("schedule must be sensors x short-segments");
  }
  const double jd = static_cast<double>(path.j);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scenario.sensor_count()));
  for (std::size_t s = 0; s < scenario.sensor_count(); ++s) {
    double total = 0.0;
    for (std::size_t l = 1; l <= path.long_segments(); ++l) {
      const Eigen::Vector3d a = path.designable[l - 1].vec();
      const Eigen::Vector3d b = path.designable[l].vec();
      double inner = 0.0;
      for (std::size_t j = 1; j <= path.j; ++j) {
        const Position3 q = (j == path.j) ? path.designable[l] : Position3(a + (static_cast<double>(j) / jd) * (b - a));
        const auto col = static_cast<Eigen::Index>((l - 1) * path.j + (j - 1));
        inner += schedule.alpha(static_cast<Eigen::Index>(s), col) *
                 spectral_efficiency(q, scenario.sensors[s], scenario.tx_powers[s], scenario.beta0, scenario.noise_power);
      }
      total += path.durations[l - 1] / jd * inner;
    }
    out(static_cast<Eigen::Index>(s)) = total / scenario.period;
  }
  return out;
}

}  // namespace flexpath::discretize
