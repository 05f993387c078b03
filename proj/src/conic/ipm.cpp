#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SparseCholesky>

#include "flexpath/conic/cone_algebra.hpp"
#include "flexpath/conic/cone_program.hpp"
#include "flexpath/core/errors.hpp"

namespace flexpath::conic {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

constexpr double kStepFraction = 0.99;

// Quasi-definite KKT system
//   [ dI   A'   G'      ] [dx]   [bx]
//   [ A   -dI   0       ] [dy] = [by]
//   [ G    0   -W^2 - dI] [dz]   [bz]
// factored with a sparse LDL' (lower triangle) and refined against d = 0.
class KktSystem {
 public:
  KktSystem(const ConeProgram& prog, double reg, int refinement)
      : prog_(prog), n_(prog.num_vars()), p_(prog.b.size()), m_(prog.h.size()), reg_(reg), refinement_(refinement) {}

  bool factor(const ConeDims& dims, const NtScaling* w) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n_ + p_ + m_ + prog_.a.nonZeros() + prog_.g.nonZeros()));
    for (Index i = 0; i < n_; ++i) t.emplace_back(i, i, reg_);
    for (Index i = 0; i < p_; ++i) t.emplace_back(n_ + i, n_ + i, -reg_);
    for (Index k = 0; k < prog_.a.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(prog_.a, k); it; ++it) t.emplace_back(n_ + it.row(), it.col(), it.value());
    }
    for (Index k = 0; k < prog_.g.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(prog_.g, k); it; ++it) t.emplace_back(n_ + p_ + it.row(), it.col(), it.value());
    }
    const Index zoff = n_ + p_;
    for (Index i = 0; i < dims.nonneg; ++i) {
      const double d = w ? w->d(i) : 1.0;
      t.emplace_back(zoff + i, zoff + i, -d * d - reg_);
    }
    Index off = dims.nonneg;
    for (std::size_t b = 0; b < dims.soc.size(); ++b) {
      const Index k = dims.soc[b];
      Eigen::MatrixXd w2 = w ? soc_w_squared(w->soc[b]) : Eigen::MatrixXd::Identity(k, k);
      for (Index c = 0; c < k; ++c) {
        for (Index r = c; r < k; ++r) {
          t.emplace_back(zoff + off + r, zoff + off + c, -w2(r, c) - (r == c ? reg_ : 0.0));
        }
      }
      off += k;
    }
    const Index size = n_ + p_ + m_;
    kkt_.resize(size, size);
    kkt_.setFromTriplets(t.begin(), t.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(kkt_);
      analyzed_ = true;
    }
    ldlt_.factorize(kkt_);
    return ldlt_.info() == Eigen::Success;
  }

  bool solve(const VectorXd& rhs, VectorXd& sol) const {
    sol = ldlt_.solve(rhs);
    if (!sol.allFinite()) return false;
    for (int it = 0; it < refinement_; ++it) {
      const VectorXd r = rhs - apply_unregularized(sol);
      if (r.lpNorm<Eigen::Infinity>() <= 1e-14 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())) break;
      const VectorXd corr = ldlt_.solve(r);
      if (!corr.allFinite()) return false;
      sol += corr;
    }
    return true;
  }

 private:
  VectorXd apply_unregularized(const VectorXd& v) const {
    VectorXd out = kkt_.selfadjointView<Eigen::Lower>() * v;
    out.head(n_) -= reg_ * v.head(n_);
    out.segment(n_, p_) += reg_ * v.segment(n_, p_);
    out.tail(m_) += reg_ * v.tail(m_);
    return out;
  }

  const ConeProgram& prog_;
  Index n_, p_, m_;
  double reg_;
  int refinement_;
  SparseMatrix kkt_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  bool analyzed_ = false;
};

struct Residuals {
  VectorXd rx, ry, rz;
  double pres = 0.0, dres = 0.0, pcost = 0.0, dcost = 0.0, gap = 0.0, relgap = std::numeric_limits<double>::infinity();
};

Residuals residuals(const ConeProgram& prog, const VectorXd& x, const VectorXd& y, const VectorXd& z,
                    const VectorXd& s) {
  Residuals r;
  r.rx = prog.c + prog.a.transpose() * y + prog.g.transpose() * z;
  r.ry = prog.a * x - prog.b;
  r.rz = prog.g * x + s - prog.h;
  const double bnorm = std::max(1.0, prog.b.norm());
  const double hnorm = std::max(1.0, prog.h.norm());
  const double cnorm = std::max(1.0, prog.c.norm());
  r.pres = std::max(r.ry.size() ? r.ry.norm() / bnorm : 0.0, r.rz.norm() / hnorm);
  r.dres = r.rx.norm() / cnorm;
  r.pcost = prog.c.dot(x);
  r.dcost = -prog.b.dot(y) - prog.h.dot(z);
  r.gap = s.dot(z);
  if (r.pcost < 0.0) {
    r.relgap = r.gap / -r.pcost;
  } else if (r.dcost > 0.0) {
    r.relgap = r.gap / r.dcost;
  }
  return r;
}

bool converged(const Residuals& r, const SolverSettings& st, double factor) {
  return r.pres <= factor * st.feastol && r.dres <= factor * st.feastol &&
         (r.gap <= factor * st.abstol || r.relgap <= factor * st.reltol);
}

void fill(SolveResult& out, const Residuals& r) {
  out.primal_objective = r.pcost;
  out.dual_objective = r.dcost;
  out.primal_residual = r.pres;
  out.dual_residual = r.dres;
  out.gap = r.gap;
}

// Moves v into the interior of K by adding a multiple of the identity when needed.
void shift_into_cone(const ConeDims& dims, VectorXd& v) {
  const double a = min_shift(dims, v);
  if (a >= -1e-8 * std::max(v.norm(), 1.0)) v += (1.0 + a) * cone_identity(dims);
}

}  // namespace

SolveResult InteriorPointSolver::solve(const ConeProgram& prog, const SolverSettings& st) const {
  prog.check();
  const ConeDims& dims = prog.cones;
  const Index n = prog.num_vars();
  const Index p = prog.b.size();
  const Index m = prog.h.size();
  if (m == 0) throw DimensionError("interior-point solver needs at least one cone constraint");

  SolveResult out;
  KktSystem kkt(prog, st.static_regularization, st.refinement_steps);
  if (!kkt.factor(dims, nullptr)) {
    out.status = SolveStatus::kNumericalError;
    return out;
  }

  VectorXd sol;
  VectorXd rhs = VectorXd::Zero(n + p + m);
  rhs.segment(n, p) = prog.b;
  rhs.tail(m) = prog.h;
  if (!kkt.solve(rhs, sol)) {
    out.status = SolveStatus::kNumericalError;
    return out;
  }
  VectorXd x = sol.head(n);
  VectorXd s = -sol.tail(m);

  rhs.setZero();
  rhs.head(n) = -prog.c;
  if (!kkt.solve(rhs, sol)) {
    out.status = SolveStatus::kNumericalError;
    return out;
  }
  VectorXd y = sol.segment(n, p);
  VectorXd z = sol.tail(m);

  shift_into_cone(dims, s);
  shift_into_cone(dims, z);

  const VectorXd e = cone_identity(dims);
  const double degree = static_cast<double>(dims.degree());

  auto finish = [&](SolveStatus status, int iters) {
    const Residuals r = residuals(prog, x, y, z, s);
    out.x = x;
    out.y = y;
    out.z = z;
    out.s = s;
    out.iterations = iters;
    fill(out, r);
    if (status != SolveStatus::kOptimal && converged(r, st, st.inaccurate_factor)) status = SolveStatus::kInaccurate;
    out.status = status;
    return out;
  };

  for (int iter = 0; iter <= st.max_iterations; ++iter) {
    const Residuals r = residuals(prog, x, y, z, s);
    if (converged(r, st, 1.0)) return finish(SolveStatus::kOptimal, iter);
    if (iter == st.max_iterations) break;
    if (!s.allFinite() || !z.allFinite()) return finish(SolveStatus::kNumericalError, iter);

    const NtScaling w = compute_scaling(dims, s, z);
    if (!w.lambda.allFinite()) return finish(SolveStatus::kNumericalError, iter);
    if (!kkt.factor(dims, &w)) return finish(SolveStatus::kNumericalError, iter);
    const double mu = s.dot(z) / degree;

    // Solves for (dx, dy, dz, ds) given the complementarity target bc.
    auto newton = [&](const VectorXd& bc, VectorXd& dx, VectorXd& dy, VectorXd& dz, VectorXd& ds) {
      const VectorXd u = jordan_divide(dims, w.lambda, bc);
      const VectorXd wu = apply_w(dims, w, u);
      VectorXd b(n + p + m);
      b.head(n) = -r.rx;
      b.segment(n, p) = -r.ry;
      b.tail(m) = -r.rz - wu;
      VectorXd d;
      if (!kkt.solve(b, d)) return false;
      dx = d.head(n);
      dy = d.segment(n, p);
      dz = d.tail(m);
      ds = wu - apply_w(dims, w, apply_w(dims, w, dz));
      return dx.allFinite() && dz.allFinite() && ds.allFinite();
    };

    const VectorXd lam_sq = jordan_product(dims, w.lambda, w.lambda);
    VectorXd dxa, dya, dza, dsa;
    if (!newton(-lam_sq, dxa, dya, dza, dsa)) return finish(SolveStatus::kNumericalError, iter);
    const double alpha_aff = std::min({1.0, max_step(dims, s, dsa), max_step(dims, z, dza)});
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    const VectorXd cross = jordan_product(dims, apply_w_inv(dims, w, dsa), apply_w(dims, w, dza));
    const VectorXd bc = -lam_sq - cross + sigma * mu * e;
    VectorXd dx, dy, dz, ds;
    if (!newton(bc, dx, dy, dz, ds)) return finish(SolveStatus::kNumericalError, iter);
    const double alpha =
        std::min(1.0, kStepFraction * std::min(max_step(dims, s, ds), max_step(dims, z, dz)));
    if (!(alpha > 1e-14)) return finish(SolveStatus::kNumericalError, iter);

    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
  }
  return finish(SolveStatus::kMaxIterations, st.max_iterations);
}

}  // namespace flexpath::conic
