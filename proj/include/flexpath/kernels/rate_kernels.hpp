#pragma once

// Data-parallel rate kernels. Every kernel exists twice: `serial::` is the
// plain nested-loop reference kept for testing, `parallel::` is the OpenMP
// version used by the library. Both must agree to rounding.

#include <Eigen/Dense>

namespace flexpath::kernels {

/// Ground sensors in column-major form with their SNR scale gamma_s = P_s*beta0/sigma^2.
struct SensorField {
  Eigen::Matrix3Xd positions;
  Eigen::VectorXd gamma;

  Eigen::Index size() const { return positions.cols(); }
};

namespace serial {

/// se(s, n) = log2(1 + gamma_s / |p_n - w_s|^2).
Eigen::MatrixXd spectral_matrix(const SensorField& field, const Eigen::Matrix3Xd& points);

/// rate_s = (1/period) * sum_n alpha(s,n) * durations(n) * se(s,n).
Eigen::VectorXd weighted_rates(const Eigen::MatrixXd& se, const Eigen::MatrixXd& alpha,
                               const Eigen::VectorXd& durations, double period);

/// Composite-midpoint quadrature of the time-averaged rate along the
/// piecewise-linear path `waypoints` (3 x (N+1)), `substeps` nodes per segment.
Eigen::VectorXd midpoint_rates(const SensorField& field, const Eigen::Matrix3Xd& waypoints,
                               const Eigen::VectorXd& durations, const Eigen::MatrixXd& alpha, int substeps,
                               double period);

}  // namespace serial

namespace parallel {

Eigen::MatrixXd spectral_matrix(const SensorField& field, const Eigen::Matrix3Xd& points);

Eigen::VectorXd weighted_rates(const Eigen::MatrixXd& se, const Eigen::MatrixXd& alpha,
                               const Eigen::VectorXd& durations, double period);

Eigen::VectorXd midpoint_rates(const SensorField& field, const Eigen::Matrix3Xd& waypoints,
                               const Eigen::VectorXd& durations, const Eigen::MatrixXd& alpha, int substeps,
                               double period);

}  // namespace parallel

}  // namespace flexpath::kernels
