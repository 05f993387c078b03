#pragma once

#include <cstddef>

#include "flexpath/core/model.hpp"

namespace flexpath::discretize {

/// Constants of the finite-sum error analysis for the LoS rate utility.
struct ApproxBoundParams {
  double c1 = 0.0;         // m, horizontal offset of the steepest point
  double c2 = 0.0;         // P*beta0/sigma^2
  double d_u = 0.0;        // bps/Hz per meter
  double delta_max = 0.0;  // m
  double e_u_max = 0.0;    // error budget on the integrated utility
};

struct SteepestPoint {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// c2 = snr_scale and the horizontal distance c1 at which the horizontal
/// gradient of log2(1 + c2/d^2) peaks for a receiver at altitude h_min.
SteepestPoint compute_c1_c2(double snr_scale, double h_min);
/// Uses the strongest sensor (largest c2 gives the steepest utility).
SteepestPoint compute_c1_c2(const Scenario& scenario);

double compute_du(const SteepestPoint& point, double h_min);
/// Max over sensors of the per-sensor gradient bound.
double compute_du(const Scenario& scenario);

/// Segment-length cap keeping the integrated error below e_u_max: 2E / (T * D_u).
double compute_delta_max(double e_u_max, double period, double d_u);

/// 0.5 * D_u * delta * T.
double lemma1_bound(double d_u, double delta_max, double period);

/// Full chain scenario -> (c1, c2, D_u, delta_max). Multi-sensor scenarios take
/// the minimum per-sensor delta_max.
ApproxBoundParams derive_bounds(const Scenario& scenario, double e_u_max);

/// Equal-slot time grid for TD.
struct TdGrid {
  std::size_t m = 0;
  double dt = 0.0;
};

/// Smallest M with T/M <= delta_max / v_max.
TdGrid make_td_grid(const Scenario& scenario, double delta_max);

/// ceil(|q_start - q_end| / delta_max).
std::size_t compute_n_min(const Position3& q_start, const Position3& q_end, double delta_max);

}  // namespace flexpath::discretize
