#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexpath/core/model.hpp"
#include "flexpath/solver/problem.hpp"

namespace flexpath::harness {

/// Name of the generator used for sensor layouts; stored in every record.
inline constexpr const char* kSensorRng = "std::mt19937_64";

/// Uniform sensors in [0, side]^2 on the ground. Draw order: x then y per sensor.
struct SensorGenerator {
  std::size_t count = 10;
  double side_m = 100.0;
  std::uint64_t seed = 1;
};

struct PhysicsConfig {
  double period_s = 100.0;
  double v_max_mps = 20.0;
  double h_min_m = 100.0;
  double beta0_db = -60.0;
  double noise_dbw = -90.0;
  double tx_power_w = 0.2;
  std::optional<double> e_u_max;    // error budget; drives the derived delta_max
  std::optional<double> delta_max_m;  // user value, overrides the derived one when both are set
  double epsilon_robust = 0.0;
};

/// Union of all scheme parameters; `kind` decides which are read.
struct SchemeConfig {
  solver::SchemeKind kind = solver::SchemeKind::kFpd;
  std::size_t m = 0;  // TD, 0 = from the delta_max grid
  std::size_t n = 40;
  std::size_t l = 20;
  std::size_t j = 2;
  std::size_t k = 6;
  basis::BasisKind basis = basis::BasisKind::kFourier;
  basis::Selection selection = basis::Selection::kLowestFrequency;
};

enum class SweepAxis { kNFpd, kJ, kK, kScheme };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct SweepConfig {
  SweepAxis axis = SweepAxis::kK;
  std::vector<std::string> values;
};

struct RunConfig {
  std::optional<std::vector<Position3>> sensors;  // explicit ground positions
  std::optional<std::vector<double>> tx_powers;   // per sensor, explicit lists only
  std::optional<SensorGenerator> generator;
  std::optional<Position3> q_start;  // default: origin at h_min
  std::optional<Position3> q_end;    // default: q_start
  PhysicsConfig physics;
  SchemeConfig scheme;
  solver::SolverConfig solver;
  std::optional<SweepConfig> sweep;
  std::string output = "results";
  int repetitions = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

double db_to_linear(double db);

/// Parses the JSON text of a run config. dB fields are converted when the
/// scenario is built. Throws ConfigError with a line/column or field path.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

/// Sensor positions (generated or explicit) and linear physics.
Scenario build_scenario(const RunConfig& config);

/// Quantities derived from the physics block before solving.
struct Derived {
  std::optional<double> delta_max_derived_m;  // from e_u_max
  double delta_max_m = 0.0;                   // value used by the solver
  double c1_m = 0.0;
  double c2 = 0.0;
  double d_u = 0.0;
  double dt_s = 0.0;  // TD slot T/M for the used delta_max
  std::size_t m_td = 0;
  std::size_t n_min = 0;
  std::optional<double> rho_comp;  // FPD-PC only
  std::size_t design_variables = 0;
};

/// Throws ConfigError when neither e_u_max nor delta_max_m is set.
Derived derive(const RunConfig& config, const Scenario& scenario);

solver::Scheme make_scheme(const SchemeConfig& config, const Derived& derived);
solver::ProblemSpec make_problem(const RunConfig& config);

}  // namespace flexpath::harness
