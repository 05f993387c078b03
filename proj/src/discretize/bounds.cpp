#include "flexpath/discretize/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace flexpath::discretize {

SteepestPoint compute_c1_c2(double snr_scale, double h_min) {
  const double c2 = snr_scale;
  const double h2 = h_min * h_min;
  const double radical = std::sqrt(16.0 * h2 * h2 + 16.0 * c2 * h2 + c2 * c2);
  const double c1_sq = (-(2.0 * h2 + c2) + radical) / 6.0;
  return {std::sqrt(std::max(c1_sq, 0.0)), c2};
}

SteepestPoint compute_c1_c2(const Scenario& scenario) {
  double strongest = 0.0;
  for (std::size_t s = 0; s < scenario.sensor_count(); ++s) strongest = std::max(strongest, scenario.snr_scale(s));
  return compute_c1_c2(strongest, scenario.h_min);
}

double compute_du(const SteepestPoint& point, double h_min) {
  const double h2 = h_min * h_min;
  const double c1 = point.c1;
  const double c2 = point.c2;
  const double d2 = c1 * c1 + h2;
  return (2.0 * c2 / std::numbers::ln2) * c1 / (d2 * (d2 + c2));
}

double compute_du(const Scenario& scenario) {
  double d_u = 0.0;
  for (std::size_t s = 0; s < scenario.sensor_count(); ++s) {
    d_u = std::max(d_u, compute_du(compute_c1_c2(scenario.snr_scale(s), scenario.h_min), scenario.h_min));
  }
  return d_u;
}

double compute_delta_max(double e_u_max, double period, double d_u) {
  if (!(e_u_max > 0.0) || !(period > 0.0) || !(d_u > 0.0)) {
    throw Error("delta_max needs positive error budget, period and gradient bound");
  }
  return 2.0 * e_u_max / (period * d_u);
}

double lemma1_bound(double d_u, double delta_max, double period) { return 0.5 * d_u * delta_max * period; }

ApproxBoundParams derive_bounds(const Scenario& scenario, double e_u_max) {
  ApproxBoundParams out;
  out.e_u_max = e_u_max;
  const SteepestPoint steepest = compute_c1_c2(scenario);
  out.c1 = steepest.c1;
  out.c2 = steepest.c2;
  // D_u grows with c2, so the strongest sensor sets both D_u and the minimum delta_max.
  out.d_u = compute_du(scenario);
  out.delta_max = compute_delta_max(e_u_max, scenario.period, out.d_u);
  return out;
}

TdGrid make_td_grid(const Scenario& scenario, double delta_max) {
  if (!(delta_max > 0.0)) throw Error("delta_max must be positive");
  const double exact = scenario.period * scenario.v_max / delta_max;
  // Guard against 400.0000000001 from rounding in T*V/delta.
  auto m = static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-12)));
  m = std::max<std::size_t>(m, 1);
  return {m, scenario.period / static_cast<double>(m)};
}

std::size_t compute_n_min(const Position3& q_start, const Position3& q_end, double delta_max) {
  if (!(delta_max > 0.0)) throw Error("delta_max must be positive");
  const double ratio = distance(q_start, q_end) / delta_max;
  return static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
}

}  // namespace flexpath::discretize
