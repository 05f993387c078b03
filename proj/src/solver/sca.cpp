#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "flexpath/core/errors.hpp"
#include "flexpath/discretize/rates.hpp"
#include "flexpath/kernels/rate_kernels.hpp"
#include "flexpath/solver/solver.hpp"
#include "internal.hpp"

namespace flexpath::solver {

namespace {

using conic::AffineExpr;
using conic::Term;
using detail::horizontal;

// First-order lower bound of g(z) = log2(1 + gamma/z) at z0: g(z0) - slope * (z - z0).
struct Linearization {
  double g0;
  double slope;
};

Linearization linearize(double gamma, double z0) {
  if (!(z0 > 0.0)) throw InfiniteRateError("surrogate expansion point coincides with a sensor");
  return {std::log2(1.0 + gamma / z0), gamma / (std::numbers::ln2 * z0 * (z0 + gamma))};
}

AffineExpr combine(const AffineExpr& a, double wa, const AffineExpr& b, double wb) {
  AffineExpr out;
  out.constant = wa * a.constant + wb * b.constant;
  for (const auto& [v, c] : a.terms) out.terms.emplace_back(v, wa * c);
  for (const auto& [v, c] : b.terms) {
    auto it = std::find_if(out.terms.begin(), out.terms.end(), [v = v](const Term& t) { return t.first == v; });
    if (it != out.terms.end()) {
      it->second += wb * c;
    } else {
      out.terms.emplace_back(v, wb * c);
    }
  }
  std::erase_if(out.terms, [](const Term& t) { return t.second == 0.0; });
  return out;
}

AffineExpr scaled(AffineExpr e, double k, double shift) {
  for (auto& t : e.terms) t.second *= k;
  e.constant = k * e.constant + shift;
  return e;
}

// Affine description of the horizontal designable waypoints (in units of `ls`)
// over the step variables, plus how to map a solution back.
struct Parameterization {
  Eigen::Index num_vars = 0;
  std::vector<std::array<AffineExpr, 2>> designable;  // L+1 entries
  Eigen::MatrixXd eq_a;                               // extra equalities over the variables
  Eigen::VectorXd eq_b;
};

Parameterization waypoint_parameterization(const ProblemSpec& spec, std::size_t l_count, double ls) {
  Parameterization p;
  p.designable.resize(l_count + 1);
  const Scenario& sc = spec.scenario;
  for (std::size_t i = 0; i <= l_count; ++i) {
    const bool pinned = spec.pin_endpoints && (i == 0 || i == l_count);
    if (pinned) {
      const Position3& q = i == 0 ? sc.q_start : sc.q_end;
      p.designable[i][0] = {{}, q.x / ls};
      p.designable[i][1] = {{}, q.y / ls};
    } else {
      p.designable[i][0] = {{{p.num_vars, 1.0}}, 0.0};
      p.designable[i][1] = {{{p.num_vars + 1, 1.0}}, 0.0};
      p.num_vars += 2;
    }
  }
  p.eq_a.resize(0, p.num_vars);
  p.eq_b.resize(0);
  return p;
}

Parameterization coeff_parameterization(const ProblemSpec& spec, const Eigen::MatrixXd& rows, double ls) {
  Parameterization p;
  const Eigen::Index k = rows.rows();
  const Eigen::Index n = rows.cols();
  p.num_vars = 2 * k;
  p.designable.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int d = 0; d < 2; ++d) {
      AffineExpr e;
      for (Eigen::Index r = 0; r < k; ++r) {
        if (rows(r, i) != 0.0) e.terms.emplace_back(d * k + r, rows(r, i));
      }
      p.designable[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = std::move(e);
    }
  }
  if (spec.pin_endpoints) {
    const Scenario& sc = spec.scenario;
    p.eq_a = Eigen::MatrixXd::Zero(4, p.num_vars);
    p.eq_b.resize(4);
    const std::array<Eigen::Index, 2> cols{0, n - 1};
    const std::array<const Position3*, 2> targets{&sc.q_start, &sc.q_end};
    for (int j = 0; j < 2; ++j) {
      for (int d = 0; d < 2; ++d) {
        const Eigen::Index row = 2 * j + d;
        p.eq_a.block(row, d * k, 1, k) = rows.col(cols[static_cast<std::size_t>(j)]).transpose();
        p.eq_b(row) = (d == 0 ? targets[static_cast<std::size_t>(j)]->x : targets[static_cast<std::size_t>(j)]->y) / ls;
      }
    }
  } else {
    p.eq_a.resize(0, p.num_vars);
    p.eq_b.resize(0);
  }
  return p;
}

double length_scale(const ProblemSpec& spec, const Eigen::Matrix2Xd& h) {
  double ls = std::max(1.0, h.cwiseAbs().maxCoeff());
  for (const auto& w : spec.scenario.sensors) ls = std::max({ls, std::abs(w.x), std::abs(w.y)});
  return ls;
}

struct SurrogateSolve {
  Eigen::VectorXd x;  // step variables
  conic::SolveStatus status;
  bool skipped = false;
};

// Builds and solves max eta s.t. eta <= surrogate rate of every sensor, segment caps, equalities.
SurrogateSolve solve_surrogate(const ProblemSpec& spec, const Design& current, const Schedule& schedule,
                               const Parameterization& par, double ls, double current_objective,
                               const conic::ConeSolver& backend) {
  const Scenario& sc = spec.scenario;
  const auto& path = current.path;
  const auto l_count = static_cast<Eigen::Index>(path.long_segments());
  const auto j_count = static_cast<Eigen::Index>(path.j);
  const auto s_count = static_cast<Eigen::Index>(sc.sensor_count());
  const double period = sc.period;
  const PiecewiseTrajectory traj = expand(spec, current);
  const Eigen::Matrix3Xd pts = discretize::evaluation_points(traj);

  SurrogateSolve out;
  out.status = conic::SolveStatus::kOptimal;
  if (par.num_vars == 0 || s_count == 0 || !(current_objective > 0.0)) {
    out.skipped = true;
    return out;
  }

  // Short-segment terminal points as affine expressions.
  std::vector<std::array<AffineExpr, 2>> short_pts(static_cast<std::size_t>(l_count * j_count));
  for (Eigen::Index l = 1; l <= l_count; ++l) {
    for (Eigen::Index j = 1; j <= j_count; ++j) {
      const double f = static_cast<double>(j) / static_cast<double>(j_count);
      auto& dst = short_pts[static_cast<std::size_t>((l - 1) * j_count + (j - 1))];
      for (std::size_t d = 0; d < 2; ++d) {
        dst[d] = combine(par.designable[static_cast<std::size_t>(l - 1)][d], 1.0 - f,
                         par.designable[static_cast<std::size_t>(l)][d], f);
      }
    }
  }

  struct Pair {
    Eigen::Index s, n;
    double coeff;  // multiplier of sigma in the epigraph row (already / rho)
  };
  std::vector<Pair> pairs;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s_count);
  const double rho = current_objective;
  for (Eigen::Index s = 0; s < s_count; ++s) {
    const Position3& w = sc.sensors[static_cast<std::size_t>(s)];
    const double gamma = sc.snr_scale(static_cast<std::size_t>(s));
    const double dz = sc.h_min - w.z;
    bool any = false;
    for (Eigen::Index n = 0; n < l_count * j_count; ++n) {
      const double t = path.durations[static_cast<std::size_t>(n / j_count)] / static_cast<double>(j_count);
      const double weight = schedule.alpha(s, n) * t / period;
      if (!(weight > 0.0)) continue;
      const double z0 = (pts.col(n) - w.vec()).squaredNorm();
      const auto lin = linearize(gamma, z0);
      rhs(s) += weight * (lin.g0 + lin.slope * (z0 - dz * dz)) / rho;
      pairs.push_back({s, n, weight * lin.slope * ls * ls / rho});
      any = true;
    }
    if (!any) {
      out.skipped = true;
      return out;
    }
  }

  const Eigen::Index nv = par.num_vars;
  const Eigen::Index eta = nv;
  const bool aggregated = spec.config.surrogate_form == SurrogateForm::kAggregated ||
                          (spec.config.surrogate_form == SurrogateForm::kAuto &&
                           nv <= static_cast<Eigen::Index>(spec.config.aggregated_max_vars));

  const Eigen::Index sigma0 = nv + 1;
  conic::ConeProgramBuilder b(aggregated ? nv + 1 : sigma0 + static_cast<Eigen::Index>(pairs.size()));
  b.set_objective(eta, -1.0);

  if (aggregated) {
    // Per sensor: sum coeff * |u_n|^2 = x'Qx + 2q'x + r = |Fx + f|^2 + kappa,
    // then eta <= rhs - kappa - |Fx + f|^2 as one rotated cone.
    std::vector<Eigen::MatrixXd> quad(static_cast<std::size_t>(s_count), Eigen::MatrixXd::Zero(nv, nv));
    std::vector<Eigen::VectorXd> lin(static_cast<std::size_t>(s_count), Eigen::VectorXd::Zero(nv));
    Eigen::VectorXd con = Eigen::VectorXd::Zero(s_count);
    Eigen::VectorXd grad(nv);
    for (const auto& pr : pairs) {
      const Position3& w = sc.sensors[static_cast<std::size_t>(pr.s)];
      const auto& p = short_pts[static_cast<std::size_t>(pr.n)];
      auto& qm = quad[static_cast<std::size_t>(pr.s)];
      auto& qv = lin[static_cast<std::size_t>(pr.s)];
      for (std::size_t d = 0; d < 2; ++d) {
        const double off = p[d].constant - (d == 0 ? w.x : w.y) / ls;
        grad.setZero();
        for (const auto& [v, c] : p[d].terms) grad(v) += c;
        qm.noalias() += pr.coeff * grad * grad.transpose();
        qv += pr.coeff * off * grad;
        con(pr.s) += pr.coeff * off * off;
      }
    }
    for (Eigen::Index s = 0; s < s_count; ++s) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(quad[static_cast<std::size_t>(s)]);
      const Eigen::VectorXd& lam = eig.eigenvalues();
      const double floor = 1e-13 * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > floor) keep.push_back(i);
      }
      const Eigen::VectorXd vq = eig.eigenvectors().transpose() * lin[static_cast<std::size_t>(s)];
      double kappa = con(s);
      std::vector<AffineExpr> cone;
      const double top = rhs(s);
      cone.push_back({{{eta, -1.0}}, 0.0});
      cone.push_back({{{eta, -1.0}}, 0.0});
      for (const Eigen::Index i : keep) {
        const double root = std::sqrt(lam(i));
        const double fi = vq(i) / root;
        kappa -= fi * fi;
        AffineExpr e;
        for (Eigen::Index v = 0; v < nv; ++v) {
          const double c = eig.eigenvectors()(v, i) * root;
          if (c != 0.0) e.terms.emplace_back(v, 2.0 * c);
        }
        e.constant = 2.0 * fi;
        cone.push_back(std::move(e));
      }
      // tau = top - kappa - eta;  |Fx + f|^2 <= tau  <=>  |(tau - 1, 2(Fx + f))| <= tau + 1
      if (keep.empty()) {
        b.add_inequality({{eta, 1.0}}, top - kappa);
        continue;
      }
      cone[0].constant = top - kappa + 1.0;
      cone[1].constant = top - kappa - 1.0;
      b.add_second_order_cone(cone);
    }
  } else {
    std::vector<std::vector<Term>> epi(static_cast<std::size_t>(s_count), std::vector<Term>{{eta, 1.0}});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& pr = pairs[i];
      const Eigen::Index sv = sigma0 + static_cast<Eigen::Index>(i);
      epi[static_cast<std::size_t>(pr.s)].emplace_back(sv, pr.coeff);
      const Position3& w = sc.sensors[static_cast<std::size_t>(pr.s)];
      const auto& p = short_pts[static_cast<std::size_t>(pr.n)];
      // sigma >= |u|^2  <=>  |(sigma - 1, 2u)| <= sigma + 1
      b.add_second_order_cone({{{{sv, 1.0}}, 1.0}, {{{sv, 1.0}}, -1.0}, scaled(p[0], 2.0, -2.0 * w.x / ls),
                               scaled(p[1], 2.0, -2.0 * w.y / ls)});
    }
    for (Eigen::Index s = 0; s < s_count; ++s) b.add_inequality(epi[static_cast<std::size_t>(s)], rhs(s));
  }

  std::vector<Eigen::RowVectorXd> eq_rows;
  std::vector<double> eq_rhs;
  for (Eigen::Index i = 0; i < par.eq_a.rows(); ++i) {
    eq_rows.push_back(par.eq_a.row(i));
    eq_rhs.push_back(par.eq_b(i));
  }
  for (Eigen::Index l = 1; l <= l_count; ++l) {
    const double cap = spec.segment_cap(path.durations[static_cast<std::size_t>(l - 1)]) / ls;
    std::array<AffineExpr, 2> diff;
    for (std::size_t d = 0; d < 2; ++d) {
      diff[d] = combine(par.designable[static_cast<std::size_t>(l)][d], 1.0,
                        par.designable[static_cast<std::size_t>(l - 1)][d], -1.0);
    }
    if (cap <= 1e-12) {
      for (std::size_t d = 0; d < 2; ++d) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
        for (const auto& [v, c] : diff[d].terms) row(v) += c;
        if (row.cwiseAbs().maxCoeff() == 0.0) continue;
        eq_rows.push_back(row);
        eq_rhs.push_back(-diff[d].constant);
      }
    } else {
      b.add_second_order_cone({{{}, cap}, diff[0], diff[1]});
    }
  }
  if (!eq_rows.empty()) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(eq_rows.size()), nv);
    Eigen::VectorXd rb(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      a.row(i) = eq_rows[static_cast<std::size_t>(i)];
      rb(i) = eq_rhs[static_cast<std::size_t>(i)];
    }
    detail::add_independent_equalities(b, a, rb, 0);
  }

  const auto res = backend.solve(b.build(), spec.config.conic_settings());
  out.status = res.status;
  detail::require_usable(res, "waypoint SCA step");
  out.x = res.x.head(nv);
  return out;
}

// Largest step toward `target` (from the feasible `start`) that keeps every cap.
template <typename ToPath>
Eigen::MatrixXd feasible_blend(const ProblemSpec& spec, const Eigen::MatrixXd& start, const Eigen::MatrixXd& target,
                               const std::vector<double>& durations, ToPath to_path) {
  if (detail::caps_hold(spec, to_path(target), durations)) return target;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (detail::caps_hold(spec, to_path(start + mid * (target - start)), durations)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return start + lo * (target - start);
}

double objective_of(const ProblemSpec& spec, const Design& d, const Schedule& schedule) {
  return min_rate(design_rates(spec, d, schedule));
}

}  // namespace

Eigen::VectorXd surrogate_rates(const Scenario& scenario, const PiecewiseTrajectory& expansion,
                                const PiecewiseTrajectory& probe, const Schedule& schedule) {
  if (expansion.segment_count() != probe.segment_count()) throw DimensionError("probe and expansion differ in length");
  const Eigen::Matrix3Xd p0 = discretize::evaluation_points(expansion);
  const Eigen::Matrix3Xd p1 = discretize::evaluation_points(probe);
  const auto s_count = static_cast<Eigen::Index>(scenario.sensor_count());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s_count);
  for (Eigen::Index s = 0; s < s_count; ++s) {
    const Eigen::Vector3d w = scenario.sensors[static_cast<std::size_t>(s)].vec();
    const double gamma = scenario.snr_scale(static_cast<std::size_t>(s));
    for (Eigen::Index n = 0; n < p0.cols(); ++n) {
      const double weight = schedule.alpha(s, n) * expansion.durations[static_cast<std::size_t>(n)] / scenario.period;
      if (weight == 0.0) continue;
      const double z0 = (p0.col(n) - w).squaredNorm();
      const double z = (p1.col(n) - w).squaredNorm();
      const auto lin = linearize(gamma, z0);
      out(s) += weight * (lin.g0 - lin.slope * (z - z0));
    }
  }
  return out;
}

StepResult sca_waypoint_step(const ProblemSpec& spec, const Design& current, const Schedule& schedule,
                             const conic::ConeSolver& backend) {
  if (spec.scheme.kind == SchemeKind::kFpdPc) return sca_coeff_step(spec, current, schedule, backend);
  StepResult out{current, objective_of(spec, current, schedule), false, conic::SolveStatus::kOptimal};
  const Eigen::Matrix2Xd h_old = horizontal(current.path);
  const double ls = length_scale(spec, h_old);
  const auto par = waypoint_parameterization(spec, current.path.long_segments(), ls);
  const auto sol = solve_surrogate(spec, current, schedule, par, ls, out.objective, backend);
  out.status = sol.status;
  if (sol.skipped) return out;

  Eigen::Matrix2Xd h_new(2, h_old.cols());
  for (Eigen::Index i = 0; i < h_old.cols(); ++i) {
    for (int d = 0; d < 2; ++d) {
      const auto& e = par.designable[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
      double v = e.constant;
      for (const auto& [var, c] : e.terms) v += c * sol.x(var);
      h_new(d, i) = v * ls;
    }
  }
  h_new = feasible_blend(spec, h_old, h_new, current.path.durations, [](const Eigen::MatrixXd& m) { return m; });

  Design cand = current;
  cand.path.designable = detail::lift(h_new, spec.scenario.h_min);
  const double obj = objective_of(spec, cand, schedule);
  if (obj >= out.objective) {
    out.design = std::move(cand);
    out.objective = obj;
    out.moved = true;
  }
  return out;
}

StepResult sca_coeff_step(const ProblemSpec& spec, const Design& current, const Schedule& schedule,
                          const conic::ConeSolver& backend) {
  if (spec.scheme.kind != SchemeKind::kFpdPc) throw Error("coefficient step needs an FPD-PC scheme");
  StepResult out{current, objective_of(spec, current, schedule), false, conic::SolveStatus::kOptimal};
  const PcFrame pc = pc_frame(spec.scheme);
  if (pc.frame.rows() == pc.frame.cols() && pc.frame.isIdentity(0.0)) {
    ProblemSpec whole = spec;
    whole.scheme.kind = SchemeKind::kFpd;
    StepResult step = sca_waypoint_step(whole, current, schedule, backend);
    if (step.moved) step.design.coeffs = pc.coeffs_of(horizontal(step.design.path));
    return step;
  }
  const Eigen::Matrix2Xd h_old = horizontal(current.path);
  const double ls = length_scale(spec, h_old);
  const auto par = coeff_parameterization(spec, pc.frame, ls);
  const auto sol = solve_surrogate(spec, current, schedule, par, ls, out.objective, backend);
  out.status = sol.status;
  if (sol.skipped) return out;

  const Eigen::Index r = pc.frame.rows();
  const Eigen::MatrixXd d_old = h_old * pc.frame.transpose();
  Eigen::MatrixXd d_new(2, r);
  d_new.row(0) = sol.x.head(r).transpose() * ls;
  d_new.row(1) = sol.x.segment(r, r).transpose() * ls;
  if (spec.pin_endpoints) {
    Eigen::Matrix2Xd targets(2, 2);
    targets << spec.scenario.q_start.x, spec.scenario.q_end.x, spec.scenario.q_start.y, spec.scenario.q_end.y;
    d_new = detail::project_pins(d_new, pc.frame, {0, spec.scheme.long_segments()}, targets);
  }
  auto to_path = [&pc](const Eigen::MatrixXd& d) { return Eigen::MatrixXd(d * pc.frame); };
  d_new = feasible_blend(spec, d_old, d_new, current.path.durations, to_path);

  Design cand = current;
  const Eigen::MatrixXd q = d_new * pc.frame;
  cand.path.designable = detail::lift(q, spec.scenario.h_min);
  cand.coeffs = pc.coeffs_of(q);
  const double obj = objective_of(spec, cand, schedule);
  if (obj >= out.objective) {
    out.design = std::move(cand);
    out.objective = obj;
    out.moved = true;
  }
  return out;
}

}  // namespace flexpath::solver
