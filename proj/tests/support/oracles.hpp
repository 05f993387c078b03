#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "flexpath/core/model.hpp"

namespace flexpath::testing {

/// S sensors uniform in [0, side]^2, 0.2 W each, closed mission at the origin.
inline Scenario desk_scenario(std::uint64_t seed, std::size_t sensors, double period, double side = 100.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  Scenario sc;
  for (std::size_t s = 0; s < sensors; ++s) {
    const double x = u(rng);
    const double y = u(rng);
    sc.sensors.push_back({x, y, 0.0});
  }
  sc.tx_powers.assign(sensors, 0.2);
  sc.period = period;
  return sc;
}

/// Brute force over alpha on a `step` grid. Only full columns are enumerated:
/// rates are nonnegative, so topping a column up to sum 1 never lowers any sensor.
inline double schedule_grid_oracle(const Eigen::MatrixXd& rates, const Eigen::VectorXd& durations, double period,
                                   double step = 0.01) {
  const auto s_count = rates.rows();
  const auto n_count = rates.cols();
  const int ticks = static_cast<int>(std::lround(1.0 / step));
  std::vector<std::vector<int>> splits;
  std::vector<int> cur(static_cast<std::size_t>(s_count), 0);
  std::function<void(Eigen::Index, int)> build = [&](Eigen::Index s, int left) {
    if (s == s_count - 1) {
      cur[static_cast<std::size_t>(s)] = left;
      splits.push_back(cur);
      return;
    }
    for (int a = 0; a <= left; ++a) {
      cur[static_cast<std::size_t>(s)] = a;
      build(s + 1, left - a);
    }
  };
  build(0, ticks);

  double best = 0.0;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(s_count);
  std::function<void(Eigen::Index)> walk = [&](Eigen::Index n) {
    if (n == n_count) {
      best = std::max(best, acc.minCoeff() / period);
      return;
    }
    for (const auto& split : splits) {
      for (Eigen::Index s = 0; s < s_count; ++s) {
        acc(s) += split[static_cast<std::size_t>(s)] * step * durations(n) * rates(s, n);
      }
      walk(n + 1);
      for (Eigen::Index s = 0; s < s_count; ++s) {
        acc(s) -= split[static_cast<std::size_t>(s)] * step * durations(n) * rates(s, n);
      }
    }
  };
  walk(0);
  return best;
}

/// Two-segment duration search on a `step` grid over t2 with t1 = T - t2.
inline double duration_grid_oracle(const Eigen::MatrixXd& coeffs, const Eigen::Vector2d& lower, double period,
                                   double step = 1e-3) {
  double best = -std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(std::floor((period - lower(0) - lower(1)) / step));
  for (int i = 0; i <= n; ++i) {
    const double t2 = lower(1) + i * step;
    const double t1 = period - t2;
    best = std::max(best, ((coeffs.col(0) * t1 + coeffs.col(1) * t2) / period).minCoeff());
  }
  return best;
}

inline bool nondecreasing(const std::vector<double>& log, double slack = 1e-9) {
  for (std::size_t i = 1; i < log.size(); ++i) {
    if (log[i] < log[i - 1] - slack) return false;
  }
  return true;
}

}  // namespace flexpath::testing
