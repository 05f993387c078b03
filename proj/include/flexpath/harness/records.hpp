#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexpath/harness/config.hpp"
#include "flexpath/solver/problem.hpp"

namespace flexpath::harness {

/// One solved (or failed) configuration.
struct RunRecord {
  std::string run_id;
  RunConfig config;
  Derived derived;
  std::string sensor_rng = kSensorRng;
  std::vector<Position3> sensors;  // resolved positions
  std::uint64_t stream_seed = 0;   // per-point stream in sweeps

  // solution summary
  double objective = 0.0;
  std::vector<double> rates;
  std::size_t min_sensor = 0;
  int iterations = 0;
  double wall_seconds = 0.0;
  double waypoint_block_seconds = 0.0;
  std::vector<double> objective_log;
  std::string status;
  bool degraded = false;
  std::string error;       // empty on success
  std::string error_kind;  // "config" | "infeasible" | "solver" | ...

  PiecewiseTrajectory trajectory;
  Eigen::MatrixXd schedule;
  Eigen::MatrixXd coeffs;

  std::string version;
  std::string timestamp;

  bool ok() const { return error.empty(); }
};

nlohmann::json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& j);

/// Solve one configuration. Errors before solving (bad config, infeasible
/// initialization) propagate; the solver itself never throws here.
RunRecord run(const RunConfig& config);

/// `repetitions` runs; repetition r adds r to the generator and solver seeds.
std::vector<RunRecord> run_repeated(const RunConfig& config);

struct SweepResult {
  std::vector<RunRecord> records;  // axis order
  std::vector<std::string> axis_values;
};

/// One record per value, in axis order. Failed points are kept as records with
/// `error` set. `parallel` > 1 solves points concurrently.
SweepResult sweep(const RunConfig& base, SweepAxis axis, const std::vector<std::string>& values, int parallel = 1);

/// Config for one sweep point (exposed for tests).
RunConfig sweep_point(const RunConfig& base, SweepAxis axis, const std::string& value);

/// Deterministic per-point stream seed from (seed, index) via std::seed_seq.
std::uint64_t stream_seed(std::uint64_t seed, std::size_t index);

enum class Format { kCsv, kJsonLines };

Format format_from_string(const std::string& name);

inline const std::vector<std::string>& results_columns() {
  static const std::vector<std::string> cols{"run_id", "scheme",     "M",     "N",          "L",          "J",
                                             "K",      "delta_max_m", "objective_bps_hz", "min_sensor", "iterations",
                                             "wall_ms", "status"};
  return cols;
}

/// Writes results.csv or results.jsonl into `dir` plus, for successful runs,
/// <run_id>_trajectory.csv and <run_id>_schedule.csv. Returns the written paths.
/// Throws on an empty record list (nothing is created) or an unwritable path.
std::vector<std::string> emit(const std::vector<RunRecord>& records, const std::string& dir, Format format);

/// Writes sweep_summary.csv: axis_value, objective_bps_hz, wall_ms, iterations, status.
std::string emit_sweep_summary(const SweepResult& result, SweepAxis axis, const std::string& dir);

std::string results_csv_row(const RunRecord& record);
std::vector<RunRecord> read_jsonl(const std::string& path);

void write_trajectory_csv(const PiecewiseTrajectory& traj, const std::string& path);
PiecewiseTrajectory read_trajectory_csv(const std::string& path);
void write_schedule_csv(const Eigen::MatrixXd& alpha, const std::string& path);

}  // namespace flexpath::harness
