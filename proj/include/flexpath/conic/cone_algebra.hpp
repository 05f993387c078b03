#pragma once

// Jordan-algebra helpers for the orthant x second-order-cone product used by
// the interior-point solver. Vectors are laid out as in ConeDims: orthant
// coordinates first, then each second-order cone block.

#include <vector>

#include <Eigen/Dense>

#include "flexpath/conic/cone_program.hpp"

namespace flexpath::conic {

/// Nesterov-Todd scaling W with W z = W^{-1} s = lambda.
struct NtScaling {
  struct SocBlock {
    double beta = 1.0;
    Eigen::VectorXd v;  // W = beta (2 v v' - J), v' J v = 1
  };
  Eigen::VectorXd d;  // orthant part, W = diag(d)
  std::vector<SocBlock> soc;
  Eigen::VectorXd lambda;
};

NtScaling compute_scaling(const ConeDims& dims, const Eigen::VectorXd& s, const Eigen::VectorXd& z);
Eigen::VectorXd apply_w(const ConeDims& dims, const NtScaling& w, const Eigen::VectorXd& x);
Eigen::VectorXd apply_w_inv(const ConeDims& dims, const NtScaling& w, const Eigen::VectorXd& x);
/// Dense W^2 block of second-order cone `k`.
Eigen::MatrixXd soc_w_squared(const NtScaling::SocBlock& block);

Eigen::VectorXd jordan_product(const ConeDims& dims, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// u with lambda o u = y.
Eigen::VectorXd jordan_divide(const ConeDims& dims, const Eigen::VectorXd& lambda, const Eigen::VectorXd& y);
Eigen::VectorXd cone_identity(const ConeDims& dims);

/// Largest a >= 0 with x + a d in K (x interior); +inf when unbounded.
double max_step(const ConeDims& dims, const Eigen::VectorXd& x, const Eigen::VectorXd& d);
/// Smallest a with x + a e in K (negative when x is interior).
double min_shift(const ConeDims& dims, const Eigen::VectorXd& x);

}  // namespace flexpath::conic
