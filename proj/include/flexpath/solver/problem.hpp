#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flexpath/basis/basis.hpp"
#include "flexpath/conic/cone_program.hpp"
#include "flexpath/core/model.hpp"
#include "flexpath/discretize/fpd.hpp"

namespace flexpath::solver {

enum class SchemeKind { kTd, kCpd, kFpd, kFpdPc };

std::string to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(const std::string& name);

/// Discretization scheme. Every scheme is handled as L long-segments with J
/// short-segments each: TD is (M, 1) with fixed durations, CPD is (N, 1).
struct Scheme {
  SchemeKind kind = SchemeKind::kCpd;
  std::size_t segments = 1;  // M, N or L
  std::size_t j = 1;
  std::size_t k = 0;  // FPD-PC only
  basis::BasisKind basis = basis::BasisKind::kFourier;
  basis::Selection selection = basis::Selection::kLowestFrequency;

  static Scheme td(std::size_t m);
  static Scheme cpd(std::size_t n);
  static Scheme fpd(std::size_t l, std::size_t j);
  static Scheme fpd_pc(std::size_t l, std::size_t j, std::size_t k,
                       basis::BasisKind basis = basis::BasisKind::kFourier,
                       basis::Selection selection = basis::Selection::kLowestFrequency);

  std::size_t long_segments() const { return segments; }
  std::size_t short_segments() const { return segments * j; }
  bool fixed_durations() const { return kind == SchemeKind::kTd; }
  /// Horizontal design variables: 2(M+1), 2(N+1), 2(L+1) or 2K.
  std::size_t design_variables() const;
  /// Throws ConfigError on inconsistent counts.
  void validate() const;
};

enum class Block { kSchedule, kDurations, kWaypoints };

/// How the waypoint step writes each sensor's surrogate rate as cone constraints.
///  kAggregated: one rotated cone per sensor over the design variables (size grows with them).
///  kLifted: one epigraph variable and small cone per (sensor, short-segment) pair.
///  kAuto: aggregated up to `aggregated_max_vars` design variables, lifted above.
enum class SurrogateForm { kAuto, kAggregated, kLifted };

std::string to_string(SurrogateForm form);
SurrogateForm surrogate_form_from_string(const std::string& name);

struct SolverConfig {
  int bcd_max_iters = 50;
  double bcd_rel_tol = 1e-4;
  int sca_max_iters = 20;
  double sca_rel_tol = 1e-4;
  double conic_kkt_tol = 1e-8;
  std::uint64_t seed = 1;
  std::vector<Block> block_order{Block::kSchedule, Block::kDurations, Block::kWaypoints};
  SurrogateForm surrogate_form = SurrogateForm::kAuto;
  int aggregated_max_vars = 200;

  void validate() const;
  conic::SolverSettings conic_settings() const;
};

struct ProblemSpec {
  Scenario scenario;
  Scheme scheme;
  double delta_max = 5.0;
  SolverConfig config;
  /// Pin q_0 = q_start and q_L = q_end. Off only for hover-point studies.
  bool pin_endpoints = true;

  void validate() const;
  /// Geometric length cap of long-segment `l` for duration `t`:
  /// min(J * delta_max, t * v_max) / (1 + epsilon_robust).
  double segment_cap(double duration) const;
  /// TD slot length T/M (TD only).
  double td_slot() const;
};

/// Selected basis rows for FPD-PC, K x (L+1).
Eigen::MatrixXd pc_rows(const Scheme& scheme);

/// Selected rows P (K x (L+1)) plus an orthonormal basis `frame` (r x (L+1))
/// of their row space. Paths C P are exactly the paths D frame, and the
/// waypoint steps work in D, which stays well conditioned when P is not.
struct PcFrame {
  Eigen::MatrixXd rows;
  Eigen::MatrixXd frame;

  /// Least-squares C with C rows = q for a path q in the row space.
  Eigen::MatrixXd coeffs_of(const Eigen::MatrixXd& q) const;
};

PcFrame pc_frame(const Scheme& scheme);

/// Current design point. `coeffs` (2 x K) is set for FPD-PC only; the
/// designable waypoints then equal coeffs * pc_rows at altitude h_min.
struct Design {
  discretize::FpdPath path;
  Eigen::MatrixXd coeffs;
};

struct Solution {
  PiecewiseTrajectory trajectory;  // expanded (all short-segments)
  discretize::FpdPath path;
  Eigen::MatrixXd coeffs;
  Schedule schedule;
  Eigen::VectorXd rates;
  double objective = 0.0;
  std::size_t min_sensor = 0;
  std::vector<double> objective_log;  // entry 0 is the initial point
  int iterations = 0;
  double wall_seconds = 0.0;
  double waypoint_block_seconds = 0.0;
  int waypoint_block_calls = 0;
  std::size_t design_variables = 0;
  bool degraded = false;
  std::string status;
};

}  // namespace flexpath::solver
