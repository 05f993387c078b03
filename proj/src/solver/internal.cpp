#include "internal.hpp"

#include <algorithm>

#include "flexpath/core/errors.hpp"

namespace flexpath::solver::detail {

Eigen::Matrix2Xd horizontal(const discretize::FpdPath& path) {
  Eigen::Matrix2Xd h(2, static_cast<Eigen::Index>(path.designable.size()));
  for (std::size_t i = 0; i < path.designable.size(); ++i) {
    h(0, static_cast<Eigen::Index>(i)) = path.designable[i].x;
    h(1, static_cast<Eigen::Index>(i)) = path.designable[i].y;
  }
  return h;
}

std::vector<Position3> lift(const Eigen::Matrix2Xd& h, double altitude) {
  std::vector<Position3> out;
  out.reserve(static_cast<std::size_t>(h.cols()));
  for (Eigen::Index i = 0; i < h.cols(); ++i) out.emplace_back(h(0, i), h(1, i), altitude);
  return out;
}

bool caps_hold(const ProblemSpec& spec, const Eigen::Matrix2Xd& h, const std::vector<double>& durations) {
  for (Eigen::Index l = 1; l < h.cols(); ++l) {
    const double cap = spec.segment_cap(durations[static_cast<std::size_t>(l - 1)]);
    const double len = (h.col(l) - h.col(l - 1)).norm();
    if (len > cap * (1.0 + kCapSlack) + kCapSlack) return false;
  }
  return true;
}

void add_independent_equalities(conic::ConeProgramBuilder& builder, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                Eigen::Index first_var) {
  if (a.rows() == 0) return;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index r = 0; r < rank; ++r) {
    const Eigen::Index row = perm(r);
    std::vector<conic::Term> terms;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (a(row, c) != 0.0) terms.emplace_back(first_var + c, a(row, c));
    }
    builder.add_equality(terms, b(row));
  }
}

Eigen::MatrixXd project_pins(const Eigen::MatrixXd& coeffs, const Eigen::MatrixXd& rows,
                             const std::vector<std::size_t>& pinned, const Eigen::Matrix2Xd& targets) {
  if (pinned.empty()) return coeffs;
  Eigen::MatrixXd e(rows.rows(), static_cast<Eigen::Index>(pinned.size()));
  for (std::size_t j = 0; j < pinned.size(); ++j) {
    e.col(static_cast<Eigen::Index>(j)) = rows.col(static_cast<Eigen::Index>(pinned[j]));
  }
  // C e = targets  =>  correction D = (targets - C e) e^+
  const Eigen::MatrixXd resid = targets - coeffs * e;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(e.transpose());
  return coeffs + cod.solve(resid.transpose()).transpose();
}

void require_usable(const conic::SolveResult& res, const char* what) {
  if (!res.usable()) {
    throw SolverError(std::string(what) + ": conic backend stopped with status " + conic::to_string(res.status));
  }
}

}  // namespace flexpath::solver::detail
