#include "flexpath/solver/problem.hpp"

#include <algorithm>
#include <cmath>

#include "flexpath/core/errors.hpp"

namespace flexpath::solver {

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kTd: return "TD";
    case SchemeKind::kCpd: return "CPD";
    case SchemeKind::kFpd: return "FPD";
    case SchemeKind::kFpdPc: return "FPD-PC";
  }
  return "unknown";
}

SchemeKind scheme_kind_from_string(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "TD") return SchemeKind::kTd;
  if (n == "CPD") return SchemeKind::kCpd;
  if (n == "FPD") return SchemeKind::kFpd;
  if (n == "FPD-PC" || n == "FPDPC") return SchemeKind::kFpdPc;
  throw ConfigError("unknown scheme '" + name + "'");
}

std::string to_string(SurrogateForm form) {
  switch (form) {
    case SurrogateForm::kAuto: return "auto";
    case SurrogateForm::kAggregated: return "aggregated";
    case SurrogateForm::kLifted: return "lifted";
  }
  return "unknown";
}

SurrogateForm surrogate_form_from_string(const std::string& name) {
  if (name == "auto") return SurrogateForm::kAuto;
  if (name == "aggregated") return SurrogateForm::kAggregated;
  if (name == "lifted") return SurrogateForm::kLifted;
  throw ConfigError("unknown surrogate form '" + name + "'");
}

Scheme Scheme::td(std::size_t m) { return {SchemeKind::kTd, m, 1, 0}; }

Scheme Scheme::cpd(std::size_t n) { return {SchemeKind::kCpd, n, 1, 0}; }

Scheme Scheme::fpd(std::size_t l, std::size_t j) { return {SchemeKind::kFpd, l, j, 0}; }

Scheme Scheme::fpd_pc(std::size_t l, std::size_t j, std::size_t k, basis::BasisKind basis,
                      basis::Selection selection) {
  return {SchemeKind::kFpdPc, l, j, k, basis, selection};
}

std::size_t Scheme::design_variables() const {
  return kind == SchemeKind::kFpdPc ? 2 * k : 2 * (segments + 1);
}

void Scheme::validate() const {
  if (segments < 1) throw ConfigError("scheme needs at least one segment");
  if (j < 1) throw ConfigError("J must be >= 1");
  if ((kind == SchemeKind::kTd || kind == SchemeKind::kCpd) && j != 1) {
    throw ConfigError(to_string(kind) + " uses J = 1");
  }
  if (kind == SchemeKind::kFpdPc) {
    if (k < 1 || k > segments + 1) throw ConfigError("FPD-PC needs 1 <= K <= L+1");
    if (basis == basis::BasisKind::kCustom) throw ConfigError("FPD-PC supports the fourier and shifted-sine bases");
    if (basis == basis::BasisKind::kShiftedSine && segments % 2 != 0) {
      throw ConfigError("shifted-sine basis needs an even L");
    }
  }
}

void SolverConfig::validate() const {
  if (bcd_max_iters < 1 || sca_max_iters < 1) throw ConfigError("iteration caps must be >= 1");
  if (!(bcd_rel_tol > 0.0) || !(sca_rel_tol > 0.0) || !(conic_kkt_tol > 0.0)) {
    throw ConfigError("solver tolerances must be positive");
  }
  if (block_order.empty()) throw ConfigError("block order is empty");
}

conic::SolverSettings SolverConfig::conic_settings() const {
  conic::SolverSettings s;
  s.feastol = conic_kkt_tol;
  s.abstol = conic_kkt_tol;
  s.reltol = conic_kkt_tol;
  return s;
}

void ProblemSpec::validate() const {
  scenario.validate();
  scheme.validate();
  config.validate();
  if (!(delta_max > 0.0) || !std::isfinite(delta_max)) throw ConfigError("delta_max must be positive");
  const double h = scenario.h_min;
  if (std::abs(scenario.q_start.z - h) > kRelTol * h || std::abs(scenario.q_end.z - h) > kRelTol * h) {
    throw ConfigError("q_start and q_end must fly at h_min in the fixed-altitude problem");
  }
  if (scheme.kind == SchemeKind::kTd) {
    const double cap = scenario.period / static_cast<double>(scheme.segments) * scenario.v_max;
    if (!leq_tol(cap, delta_max)) {
      throw ConfigError("TD slot too long: M must be >= T * v_max / delta_max");
    }
  }
}

double ProblemSpec::segment_cap(double duration) const {
  const double geometric = static_cast<double>(scheme.j) * delta_max;
  return std::min(geometric, duration * scenario.v_max) / (1.0 + scenario.epsilon_robust);
}

double ProblemSpec::td_slot() const { return scenario.period / static_cast<double>(scheme.segments); }

Eigen::MatrixXd pc_rows(const Scheme& scheme) {
  const basis::BasisMatrix full = scheme.basis == basis::BasisKind::kShiftedSine
                                      ? basis::shifted_sine_basis(scheme.segments)
                                      : basis::fourier_basis(scheme.segments);
  const auto idx = basis::select_rows(scheme.segments, scheme.k, scheme.selection);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(idx.size()), full.entries.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = full.entries.row(static_cast<Eigen::Index>(idx[i]));
  }
  return rows;
}

PcFrame pc_frame(const Scheme& scheme) {
  PcFrame f;
  f.rows = pc_rows(scheme);
  const Eigen::Index n = f.rows.cols();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(f.rows.transpose());
  const Eigen::Index r = qr.rank();
  // The full Fourier basis is exactly invertible even where QR rank detection
  // says otherwise, and any orthonormal basis of the whole space will do.
  const bool full_fourier = scheme.basis == basis::BasisKind::kFourier && f.rows.rows() == n;
  if (r == n || full_fourier) {
    f.frame = Eigen::MatrixXd::Identity(n, n);
    return f;
  }
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  f.frame = q.transpose();
  return f;
}

Eigen::MatrixXd PcFrame::coeffs_of(const Eigen::MatrixXd& q) const {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(rows.transpose());
  return cod.solve(q.transpose()).transpose();
}

}  // namespace flexpath::solver
