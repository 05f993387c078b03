#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace flexpath::conic {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Term = std::pair<Eigen::Index, double>;

/// Cone K = R_+^nonneg x Q^{soc[0]} x Q^{soc[1]} x ..., where
/// Q^k = {(u0, u1) in R x R^{k-1} : |u1| <= u0}.
struct ConeDims {
  Eigen::Index nonneg = 0;
  std::vector<Eigen::Index> soc;

  Eigen::Index total() const;
  /// Barrier degree: one per orthant coordinate, one per second-order cone.
  Eigen::Index degree() const;
};

/// minimize c'x  s.t.  A x = b,  G x + s = h,  s in K.
struct ConeProgram {
  Eigen::VectorXd c;
  SparseMatrix a;
  Eigen::VectorXd b;
  SparseMatrix g;
  Eigen::VectorXd h;
  ConeDims cones;

  Eigen::Index num_vars() const { return c.size(); }
  /// Throws DimensionError when the blocks do not line up.
  void check() const;
};

/// a'x + constant, with a given as sparse (index, coefficient) terms.
struct AffineExpr {
  std::vector<Term> terms;
  double constant = 0.0;
};

/// Collects constraints in any order and lays them out as orthant rows
/// followed by second-order cone blocks.
class ConeProgramBuilder {
 public:
  explicit ConeProgramBuilder(Eigen::Index num_vars);

  Eigen::Index num_vars() const { return num_vars_; }
  void set_objective(Eigen::Index var, double coeff);
  /// sum terms <= rhs
  void add_inequality(const std::vector<Term>& terms, double rhs);
  /// sum terms == rhs
  void add_equality(const std::vector<Term>& terms, double rhs);
  /// |(e_1(x), ..., e_{k-1}(x))| <= e_0(x); `rows` holds e_0 first.
  void add_second_order_cone(const std::vector<AffineExpr>& rows);

  ConeProgram build() const;

 private:
  struct Row {
    std::vector<Term> terms;  // row of G
    double rhs;               // entry of h
  };

  Eigen::Index num_vars_;
  Eigen::VectorXd objective_;
  std::vector<Row> nonneg_rows_;
  std::vector<std::vector<Row>> soc_blocks_;
  std::vector<Row> eq_rows_;
};

enum class SolveStatus {
  kOptimal,
  kInaccurate,  // stopped early but residuals within 100x of the tolerances
  kMaxIterations,
  kNumericalError,
};

std::string to_string(SolveStatus status);

struct SolverSettings {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  int max_iterations = 100;
  double static_regularization = 1e-9;
  int refinement_steps = 4;
  /// Early stop is reported as kInaccurate when residuals are within this factor of the tolerances.
  double inaccurate_factor = 1e2;
};

struct SolveResult {
  Eigen::VectorXd x, y, z, s;
  SolveStatus status = SolveStatus::kNumericalError;
  int iterations = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;

  bool usable() const { return status == SolveStatus::kOptimal || status == SolveStatus::kInaccurate; }
};

/// Backend interface: anything that solves linear objectives over linear
/// equalities/inequalities and second-order cones.
class ConeSolver {
 public:
  virtual ~ConeSolver() = default;
  virtual SolveResult solve(const ConeProgram& program, const SolverSettings& settings) const = 0;
  virtual std::string name() const = 0;
};

/// Primal-dual path-following method with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector; sparse quasi-definite LDL' for the Newton systems.
class InteriorPointSolver final : public ConeSolver {
 public:
  SolveResult solve(const ConeProgram& program, const SolverSettings& settings) const override;
  std::string name() const override { return "ipm-nt"; }
};

std::unique_ptr<ConeSolver> make_default_solver();

}  // namespace flexpath::conic
