#include "flexpath/conic/cone_program.hpp"

#include <numeric>

#include "flexpath/core/errors.hpp"

namespace flexpath::conic {

Eigen::Index ConeDims::total() const { return std::accumulate(soc.begin(), soc.end(), nonneg); }

Eigen::Index ConeDims::degree() const { return nonneg + static_cast<Eigen::Index>(soc.size()); }

void ConeProgram::check() const {
  const Eigen::Index n = num_vars();
  if (a.cols() != n || g.cols() != n) throw DimensionError("constraint matrices need one column per variable");
  if (a.rows() != b.size()) throw DimensionError("A and b row counts differ");
  if (g.rows() != h.size()) throw DimensionError("G and h row counts differ");
  if (cones.total() != h.size()) throw DimensionError("cone dimensions do not add up to the rows of G");
  for (const auto k : cones.soc) {
    if (k < 1) throw DimensionError("second-order cones need dimension >= 1");
  }
}

ConeProgramBuilder::ConeProgramBuilder(Eigen::Index num_vars)
    : num_vars_(num_vars), objective_(Eigen::VectorXd::Zero(num_vars)) {}

void ConeProgramBuilder::set_objective(Eigen::Index var, double coeff) { objective_(var) = coeff; }

void ConeProgramBuilder::add_inequality(const std::vector<Term>& terms, double rhs) {
  nonneg_rows_.push_back({terms, rhs});
}

void ConeProgramBuilder::add_equality(const std::vector<Term>& terms, double rhs) { eq_rows_.push_back({terms, rhs}); }

void ConeProgramBuilder::add_second_order_cone(const std::vector<AffineExpr>& rows) {
  if (rows.empty()) throw DimensionError("empty second-order cone");
  std::vector<Row> block;
  block.reserve(rows.size());
  // s = h - G x must equal e(x) = a'x + constant, so G row = -a and h = constant.
  for (const auto& e : rows) {
    Row r{e.terms, e.constant};
    for (auto& t : r.terms) t.second = -t.second;
    block.push_back(std::move(r));
  }
  soc_blocks_.push_back(std::move(block));
}

ConeProgram ConeProgramBuilder::build() const {
  ConeProgram p;
  p.c = objective_;
  p.cones.nonneg = static_cast<Eigen::Index>(nonneg_rows_.size());
  Eigen::Index m = p.cones.nonneg;
  for (const auto& block : soc_blocks_) {
    p.cones.soc.push_back(static_cast<Eigen::Index>(block.size()));
    m += static_cast<Eigen::Index>(block.size());
  }

  std::vector<Eigen::Triplet<double>> gt;
  p.h.resize(m);
  Eigen::Index row = 0;
  auto emit = [&](const Row& r) {
    for (const auto& [col, val] : r.terms) {
      if (col < 0 || col >= num_vars_) throw DimensionError("constraint references an unknown variable");
      if (val != 0.0) gt.emplace_back(row, col, val);
    }
    p.h(row) = r.rhs;
    ++row;
  };
  for (const auto& r : nonneg_rows_) emit(r);
  for (const auto& block : soc_blocks_) {
    for (const auto& r : block) emit(r);
  }
  p.g.resize(m, num_vars_);
  p.g.setFromTriplets(gt.begin(), gt.end());

  std::vector<Eigen::Triplet<double>> at;
  const auto p_rows = static_cast<Eigen::Index>(eq_rows_.size());
  p.b.resize(p_rows);
  for (Eigen::Index i = 0; i < p_rows; ++i) {
    for (const auto& [col, val] : eq_rows_[static_cast<std::size_t>(i)].terms) {
      if (col < 0 || col >= num_vars_) throw DimensionError("equality references an unknown variable");
      if (val != 0.0) at.emplace_back(i, col, val);
    }
    p.b(i) = eq_rows_[static_cast<std::size_t>(i)].rhs;
  }
  p.a.resize(p_rows, num_vars_);
  p.a.setFromTriplets(at.begin(), at.end());
  return p;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInaccurate: return "inaccurate";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kNumericalError: return "numerical_error";
  }
  return "unknown";
}

std::unique_ptr<ConeSolver> make_default_solver() { return std::make_unique<InteriorPointSolver>(); }

}  // namespace flexpath::conic
