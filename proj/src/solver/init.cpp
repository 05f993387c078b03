#include <algorithm>
#include <cmath>
#include <numbers>

#include "flexpath/core/errors.hpp"
#include "flexpath/discretize/rates.hpp"
#include "flexpath/solver/solver.hpp"
#include "internal.hpp"

namespace flexpath::solver {

namespace {

using detail::horizontal;
using detail::lift;

Eigen::Matrix2Xd initial_horizontal_path(const ProblemSpec& spec) {
  const Scenario& sc = spec.scenario;
  const auto l = static_cast<Eigen::Index>(spec.scheme.long_segments());
  const double cap = spec.segment_cap(sc.period / static_cast<double>(l));
  const Eigen::Vector2d a(sc.q_start.x, sc.q_start.y);
  const Eigen::Vector2d b(sc.q_end.x, sc.q_end.y);
  const double scale = std::max({1.0, a.norm(), b.norm()});
  Eigen::Matrix2Xd pts(2, l + 1);

  if ((a - b).norm() <= kRelTol * scale) {
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& w : sc.sensors) centroid += Eigen::Vector2d(w.x, w.y);
    if (!sc.sensors.empty()) centroid /= static_cast<double>(sc.sensors.size());
    double spread = 0.0;
    for (const auto& w : sc.sensors) spread = std::max(spread, (Eigen::Vector2d(w.x, w.y) - centroid).norm());
    Eigen::Vector2d dir = centroid - a;
    dir = dir.norm() > kRelTol * scale ? Eigen::Vector2d(dir.normalized()) : Eigen::Vector2d(1.0, 0.0);
    const double two_pi = 2.0 * std::numbers::pi;
    const double r = 0.999 * std::min({sc.v_max * sc.period / (two_pi + 0.1), spread,
                                       static_cast<double>(l) * cap / two_pi});
    if (!(r > kRelTol * scale)) {
      pts.colwise() = a;
    } else {
      const Eigen::Vector2d center = a + r * dir;
      const double phi0 = std::atan2(a.y() - center.y(), a.x() - center.x());
      for (Eigen::Index i = 0; i <= l; ++i) {
        const double phi = phi0 + two_pi * static_cast<double>(i) / static_cast<double>(l);
        pts.col(i) = center + r * Eigen::Vector2d(std::cos(phi), std::sin(phi));
      }
    }
    pts.col(0) = a;
    pts.col(l) = a;
    return pts;
  }

  const double step = (b - a).norm() / static_cast<double>(l);
  if (step > cap * (1.0 + kRelTol)) {
    throw InfeasibleError("straight line from q_start to q_end needs segments of " + std::to_string(step) +
                          " m but the cap is " + std::to_string(cap) + " m");
  }
  for (Eigen::Index i = 0; i <= l; ++i) pts.col(i) = a + (b - a) * (static_cast<double>(i) / static_cast<double>(l));
  pts.col(l) = b;
  return pts;
}

std::vector<std::size_t> pinned_columns(const ProblemSpec& spec) {
  if (!spec.pin_endpoints) return {};
  return {0, spec.scheme.long_segments()};
}

Eigen::Matrix2Xd endpoint_targets(const ProblemSpec& spec) {
  Eigen::Matrix2Xd t(2, 2);
  t << spec.scenario.q_start.x, spec.scenario.q_end.x, spec.scenario.q_start.y, spec.scenario.q_end.y;
  return t;
}

// Closest coefficients (Frobenius) to a target path that meet the caps with a small margin.
Eigen::MatrixXd project_coeffs(const ProblemSpec& spec, const Eigen::MatrixXd& rows, const Eigen::Matrix2Xd& target,
                               const std::vector<double>& durations) {
  const Eigen::Index k = rows.rows();
  const Eigen::Index n = rows.cols();
  const double ls = std::max(1.0, target.cwiseAbs().maxCoeff());
  // variables: c_x (K), c_y (K), t
  conic::ConeProgramBuilder b(2 * k + 1);
  const Eigen::Index tv = 2 * k;
  b.set_objective(tv, 1.0);
  std::vector<conic::AffineExpr> fit{{{{tv, 1.0}}, 0.0}};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int d = 0; d < 2; ++d) {
      conic::AffineExpr e;
      for (Eigen::Index r = 0; r < k; ++r) e.terms.emplace_back(d * k + r, rows(r, i));
      e.constant = -target(d, i) / ls;
      fit.push_back(std::move(e));
    }
  }
  b.add_second_order_cone(fit);
  for (Eigen::Index l = 1; l < n; ++l) {
    const double cap = spec.segment_cap(durations[static_cast<std::size_t>(l - 1)]) * (1.0 - 1e-6) / ls;
    std::vector<conic::AffineExpr> cone{{{}, cap}};
    for (int d = 0; d < 2; ++d) {
      conic::AffineExpr e;
      for (Eigen::Index r = 0; r < k; ++r) e.terms.emplace_back(d * k + r, rows(r, l) - rows(r, l - 1));
      cone.push_back(std::move(e));
    }
    b.add_second_order_cone(cone);
  }
  const auto pins = pinned_columns(spec);
  if (!pins.empty()) {
    const Eigen::Matrix2Xd tgt = endpoint_targets(spec);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 2 * k);
    Eigen::VectorXd rhs(4);
    for (std::size_t j = 0; j < 2; ++j) {
      for (int d = 0; d < 2; ++d) {
        const Eigen::Index row = static_cast<Eigen::Index>(2 * j) + d;
        a.block(row, d * k, 1, k) = rows.col(static_cast<Eigen::Index>(pins[j])).transpose();
        rhs(row) = tgt(d, static_cast<Eigen::Index>(j)) / ls;
      }
    }
    detail::add_independent_equalities(b, a, rhs, 0);
  }
  const auto res = conic::InteriorPointSolver{}.solve(b.build(), spec.config.conic_settings());
  if (!res.usable()) {
    throw InfeasibleError("no " + std::to_string(k) + "-term basis path meets the segment caps and endpoints (" +
                          conic::to_string(res.status) + ")");
  }
  Eigen::MatrixXd c(2, k);
  c.row(0) = res.x.segment(0, k).transpose() * ls;
  c.row(1) = res.x.segment(k, k).transpose() * ls;
  return detail::project_pins(c, rows, pins, endpoint_targets(spec));
}

}  // namespace

double min_rate(const Eigen::VectorXd& rates) { return rates.size() ? rates.minCoeff() : 0.0; }

PiecewiseTrajectory expand(const ProblemSpec&, const Design& design) { return discretize::expand_fpd(design.path); }

Eigen::VectorXd design_rates(const ProblemSpec& spec, const Design& design, const Schedule& schedule) {
  return discretize::finite_sum_rates(expand(spec, design), spec.scenario, schedule);
}

Design initialize(const ProblemSpec& spec) {
  spec.validate();
  const auto l = spec.scheme.long_segments();
  const double h = spec.scenario.h_min;
  Design d;
  d.path.j = spec.scheme.j;
  d.path.durations.assign(l, spec.scenario.period / static_cast<double>(l));
  Eigen::Matrix2Xd pts = initial_horizontal_path(spec);

  if (spec.scheme.kind == SchemeKind::kFpdPc) {
    const PcFrame pc = pc_frame(spec.scheme);
    Eigen::MatrixXd dcoef;
    try {
      dcoef = basis::fit_pinned(pts, pc.frame, pinned_columns(spec));
    } catch (const CompressionError& e) {
      throw InfeasibleError(std::string("endpoints are not representable: ") + e.what());
    }
    Eigen::Matrix2Xd q = dcoef * pc.frame;
    if (!detail::caps_hold(spec, q, d.path.durations)) {
      dcoef = project_coeffs(spec, pc.frame, pts, d.path.durations);
      q = dcoef * pc.frame;
      if (!detail::caps_hold(spec, q, d.path.durations)) {
        throw InfeasibleError("projected basis path still violates the segment caps");
      }
    }
    pts = q;
    d.coeffs = pc.coeffs_of(q);
  }
  d.path.designable = lift(pts, h);
  return d;
}

}  // namespace flexpath::solver
