#include <cmath>
#include <limits>

#include <omp.h>

#include "flexpath/core/errors.hpp"
#include "flexpath/kernels/rate_kernels.hpp"

namespace flexpath::kernels::parallel {

namespace {

// Returns NaN for a coincident point so the error can be raised outside the
// parallel region.
inline double rate_or_nan(double gamma, const Eigen::Vector3d& p, const Eigen::Vector3d& w) {
  if (gamma == 0.0) return 0.0;
  const double d2 = (p - w).squaredNorm();
  if (d2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(1.0 + gamma / d2);
}

}  // namespace

Eigen::MatrixXd spectral_matrix(const SensorField& field, const Eigen::Matrix3Xd& points) {
  const Eigen::Index sensors = field.size();
  const Eigen::Index count = points.cols();
  Eigen::MatrixXd se(sensors, count);
  bool coincident = false;
#pragma omp parallel for schedule(static) reduction(|| : coincident)
  for (Eigen::Index n = 0; n < count; ++n) {
    const Eigen::Vector3d p = points.col(n);
    for (Eigen::Index s = 0; s < sensors; ++s) {
      const double r = rate_or_nan(field.gamma(s), p, field.positions.col(s));
      coincident = coincident || std::isnan(r);
      se(s, n) = r;
    }
  }
  if (coincident) throw InfiniteRateError("evaluation point coincides with a sensor");
  return se;
}

Eigen::VectorXd weighted_rates(const Eigen::MatrixXd& se, const Eigen::MatrixXd& alpha,
                               const Eigen::VectorXd& durations, double period) {
  if (se.rows() != alpha.rows() || se.cols() != alpha.cols() || se.cols() != durations.size()) {
    throw DimensionError("rate, schedule and duration dimensions disagree");
  }
  const Eigen::Index sensors = se.rows();
  Eigen::VectorXd out(sensors);
#pragma omp parallel for schedule(static)
  for (Eigen::Index s = 0; s < sensors; ++s) {
    out(s) = (alpha.row(s).array() * se.row(s).array() * durations.transpose().array()).sum() / period;
  }
  return out;
}

Eigen::VectorXd midpoint_rates(const SensorField& field, const Eigen::Matrix3Xd& waypoints,
                               const Eigen::VectorXd& durations, const Eigen::MatrixXd& alpha, int substeps,
                               double period) {
  const Eigen::Index segments = durations.size();
  const Eigen::Index sensors = field.size();
  if (waypoints.cols() != segments + 1 || alpha.rows() != sensors || alpha.cols() != segments) {
    throw DimensionError("quadrature inputs have inconsistent dimensions");
  }
  // Per-segment partial integrals, reduced in a fixed order afterwards so the
  // result does not depend on the thread count.
  Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(sensors, segments);
  bool coincident = false;
#pragma omp parallel for schedule(dynamic, 4) reduction(|| : coincident)
  for (Eigen::Index n = 0; n < segments; ++n) {
    const Eigen::Vector3d a = waypoints.col(n);
    const Eigen::Vector3d d = waypoints.col(n + 1) - a;
    const double h = durations(n) / substeps;
    for (Eigen::Index s = 0; s < sensors; ++s) {
      if (alpha(s, n) == 0.0) continue;
      double acc = 0.0;
      for (int i = 0; i < substeps; ++i) {
        const double r = rate_or_nan(field.gamma(s), a + ((i + 0.5) / substeps) * d, field.positions.col(s));
        coincident = coincident || std::isnan(r);
        acc += r;
      }
      partial(s, n) = alpha(s, n) * h * acc;
    }
  }
  if (coincident) throw InfiniteRateError("quadrature node coincides with a sensor");
  return partial.rowwise().sum() / period;
}

}  // namespace flexpath::kernels::parallel
