#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

namespace flexpath::testing {

using Big = boost::multiprecision::cpp_bin_float_100;
using BigMatrix = Eigen::Matrix<Big, Eigen::Dynamic, Eigen::Dynamic>;

/// Fourier basis built from scratch in 100-digit arithmetic.
inline BigMatrix big_fourier(std::size_t l) {
  const auto n = static_cast<Eigen::Index>(l + 1);
  BigMatrix p(n, n);
  const Big pi = boost::math::constants::pi<Big>();
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      p(r, c) = r == 0 ? Big(1) : Big(sin(pi * Big(r * c) / Big(2 * l)));
    }
  }
  return p;
}

inline Eigen::Index exact_rank(const BigMatrix& p) {
  Eigen::FullPivLU<BigMatrix> lu(p);
  lu.setThreshold(Big("1e-85"));
  return lu.rank();
}

}  // namespace flexpath::testing
