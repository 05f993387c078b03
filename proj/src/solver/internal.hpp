#pragma once

#include <vector>

#include <Eigen/Dense>

#include "flexpath/conic/cone_program.hpp"
#include "flexpath/solver/problem.hpp"

namespace flexpath::solver::detail {

inline constexpr double kMinDuration = 1e-6;
inline constexpr double kCapSlack = 1e-12;

/// Horizontal designable waypoints as a 2 x (L+1) matrix.
Eigen::Matrix2Xd horizontal(const discretize::FpdPath& path);
/// Designable path at altitude h from a 2 x (L+1) matrix.
std::vector<Position3> lift(const Eigen::Matrix2Xd& h, double altitude);

bool caps_hold(const ProblemSpec& spec, const Eigen::Matrix2Xd& h, const std::vector<double>& durations);

/// Adds dense equality rows A x = b after dropping linearly dependent rows.
void add_independent_equalities(conic::ConeProgramBuilder& builder, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                Eigen::Index first_var);

/// Least-norm change of C (2 x K) so that C * rows.col(i) equals `targets.col(j)` for
/// every pinned column pinned[j].
Eigen::MatrixXd project_pins(const Eigen::MatrixXd& coeffs, const Eigen::MatrixXd& rows,
                             const std::vector<std::size_t>& pinned, const Eigen::Matrix2Xd& targets);

/// Raises SolverError unless the backend result is usable.
void require_usable(const conic::SolveResult& res, const char* what);

}  // namespace flexpath::solver::detail
