#include <cmath>

#include "flexpath/core/errors.hpp"
#include "flexpath/kernels/rate_kernels.hpp"

namespace flexpath::kernels::serial {

namespace {

double rate_at(const SensorField& field, Eigen::Index s, const Eigen::Vector3d& p) {
  const double gamma = field.gamma(s);
  if (gamma == 0.0) return 0.0;
  const double d2 = (p - field.positions.col(s)).squaredNorm();
  if (d2 == 0.0) throw InfiniteRateError("evaluation point coincides with a sensor");
  return std::log2(1.0 + gamma / d2);
}

}  // namespace

Eigen::MatrixXd spectral_matrix(const SensorField& field, const Eigen::Matrix3Xd& points) {
  Eigen::MatrixXd se(field.size(), points.cols());
  for (Eigen::Index s = 0; s < field.size(); ++s) {
    for (Eigen::Index n = 0; n < points.cols(); ++n) se(s, n) = rate_at(field, s, points.col(n));
  }
  return se;
}

Eigen::VectorXd weighted_rates(const Eigen::MatrixXd& se, const Eigen::MatrixXd& alpha,
                               const Eigen::VectorXd& durations, double period) {
  if (se.rows() != alpha.rows() || se.cols() != alpha.cols() || se.cols() != durations.size()) {
    throw DimensionError("rate, schedule and duration dimensions disagree");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(se.rows());
  for (Eigen::Index s = 0; s < se.rows(); ++s) {
    for (Eigen::Index n = 0; n < se.cols(); ++n) out(s) += alpha(s, n) * durations(n) * se(s, n);
    out(s) /= period;
  }
  return out;
}

Eigen::VectorXd midpoint_rates(const SensorField& field, const Eigen::Matrix3Xd& waypoints,
                               const Eigen::VectorXd& durations, const Eigen::MatrixXd& alpha, int substeps,
                               double period) {
  const Eigen::Index segments = durations.size();
  if (waypoints.cols() != segments + 1 || alpha.rows() != field.size() || alpha.cols() != segments) {
    throw DimensionError("quadrature inputs have inconsistent dimensions");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(field.size());
  for (Eigen::Index s = 0; s < field.size(); ++s) {
    for (Eigen::Index n = 0; n < segments; ++n) {
      const Eigen::Vector3d a = waypoints.col(n);
      const Eigen::Vector3d d = waypoints.col(n + 1) - a;
      const double h = durations(n) / substeps;
      for (int i = 0; i < substeps; ++i) {
        const double frac = (i + 0.5) / substeps;
        out(s) += alpha(s, n) * h * rate_at(field, s, a + frac * d);
      }
    }
    out(s) /= period;
  }
  return out;
}

}  // namespace flexpath::kernels::serial
