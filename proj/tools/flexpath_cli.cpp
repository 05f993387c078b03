// flexpath command line: run, sweep, bounds, compress.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "flexpath/basis/basis.hpp"
#include "flexpath/harness/records.hpp"

namespace fp = flexpath;
namespace hn = flexpath::harness;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kInfeasible = 3, kDegraded = 4 };

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "run config JSON")->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "override the generator and solver seeds");
  app->add_option("--out", c.out, "output directory (overrides 'output')");
  app->add_option("--format", c.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
}

hn::RunConfig load(const Common& c) {
  hn::RunConfig cfg = hn::load_run_config(c.config);
  if (c.seed) {
    if (cfg.generator) cfg.generator->seed = *c.seed;
    cfg.solver.seed = *c.seed;
  }
  if (c.out) cfg.output = *c.out;
  return cfg;
}

void print_record(const hn::RunRecord& r) {
  if (!r.ok()) {
    std::printf("%-48s FAILED (%s) %s\n", r.run_id.c_str(), r.error_kind.c_str(), r.error.c_str());
    return;
  }
  std::printf("%-48s objective %.6e bps/Hz  min sensor %zu  iters %d  %.1f ms  %s\n", r.run_id.c_str(), r.objective,
              r.min_sensor, r.iterations, r.wall_seconds * 1e3, r.degraded ? "DEGRADED" : "ok");
}

int cmd_run(const Common& c) {
  const hn::RunConfig cfg = load(c);
  const auto records = hn::run_repeated(cfg);
  for (const auto& r : records) print_record(r);
  hn::emit(records, cfg.output, hn::format_from_string(c.format));
  std::printf("wrote %s\n", cfg.output.c_str());
  for (const auto& r : records) {
    if (r.degraded) return kDegraded;
  }
  return kOk;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_sweep(const Common& c, const std::string& axis_flag, const std::string& values_flag, int parallel) {
  const hn::RunConfig cfg = load(c);
  std::optional<hn::SweepConfig> sw = cfg.sweep;
  if (!axis_flag.empty()) {
    if (!sw) sw = hn::SweepConfig{};
    sw->axis = hn::sweep_axis_from_string(axis_flag);
  }
  if (!values_flag.empty()) {
    if (!sw) throw fp::ConfigError("sweep: --values needs an axis");
    sw->values = split(values_flag);
  }
  if (!sw || sw->values.empty()) throw fp::ConfigError("sweep: no axis/values in the config or on the command line");
  const auto result = hn::sweep(cfg, sw->axis, sw->values, parallel);
  for (const auto& r : result.records) print_record(r);
  hn::emit(result.records, cfg.output, hn::format_from_string(c.format));
  const std::string summary = hn::emit_sweep_summary(result, sw->axis, cfg.output);
  std::printf("wrote %s and %s\n", cfg.output.c_str(), summary.c_str());
  for (const auto& r : result.records) {
    if (!r.ok() || r.degraded) return kDegraded;
  }
  return kOk;
}

int cmd_bounds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fp::ConfigError("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw fp::ConfigError(std::string("config: ") + e.what());
  }
  // Only the physics block matters; a one-sensor layout stands in when none is given.
  if (!j.contains("scenario")) j["scenario"] = {{"generator", {{"count", 1}}}};
  const hn::RunConfig cfg = hn::run_config_from_json(j);
  const fp::Scenario sc = hn::build_scenario(cfg);
  const hn::Derived d = hn::derive(cfg, sc);
  std::printf("c1_m            %.6f\n", d.c1_m);
  std::printf("c2              %.6f\n", d.c2);
  std::printf("D_u             %.6e\n", d.d_u);
  if (d.delta_max_derived_m) std::printf("delta_max_m     %.6f   (from e_u_max)\n", *d.delta_max_derived_m);
  std::printf("delta_max_used  %.6f\n", d.delta_max_m);
  std::printf("td_dt_s         %.6f\n", d.dt_s);
  std::printf("td_M            %zu\n", d.m_td);
  std::printf("N_min           %zu\n", d.n_min);
  return kOk;
}

int cmd_compress(const std::string& input, std::size_t k, const std::string& basis_name, const std::string& selection,
                 const std::string& out_path) {
  const fp::PiecewiseTrajectory traj = hn::read_trajectory_csv(input);
  const std::size_t l = traj.waypoints.size() - 1;
  Eigen::MatrixXd q(3, static_cast<Eigen::Index>(l + 1));
  for (std::size_t i = 0; i <= l; ++i) q.col(static_cast<Eigen::Index>(i)) = traj.waypoints[i].vec();
  const auto kind = fp::basis::basis_kind_from_string(basis_name);
  if (kind == fp::basis::BasisKind::kCustom) throw fp::ConfigError("compress: choose fourier or shifted-sine");
  const auto b = kind == fp::basis::BasisKind::kFourier ? fp::basis::fourier_basis(l) : fp::basis::shifted_sine_basis(l);
  const auto comp = fp::basis::compress(q, b, k, fp::basis::selection_from_string(selection));
  const Eigen::MatrixXd qh = comp.reconstruct();
  std::printf("L               %zu\n", l);
  std::printf("K               %zu\n", comp.k());
  std::printf("rho_comp        %.6f\n", comp.compression_ratio());
  std::printf("relative_error  %.6e\n", fp::basis::relative_path_error(q, qh));
  if (!out_path.empty()) {
    fp::PiecewiseTrajectory approx = traj;
    for (std::size_t i = 0; i <= l; ++i) approx.waypoints[i] = fp::Position3(Eigen::Vector3d(qh.col(static_cast<Eigen::Index>(i))));
    hn::write_trajectory_csv(approx, out_path);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flexpath: path discretization, compression and max-min trajectory design"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "solve one config (all repetitions)");
  add_common(run, run_opts);

  Common sweep_opts;
  std::string axis;
  std::string values;
  int parallel = 1;
  auto* sweep = app.add_subcommand("sweep", "solve one config per axis value");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis, "N_FPD, J, K or scheme (overrides the config)");
  sweep->add_option("--values", values, "comma-separated axis values");
  sweep->add_option("--parallel", parallel, "points solved concurrently")->check(CLI::PositiveNumber);

  std::string bounds_config;
  auto* bounds = app.add_subcommand("bounds", "print c1, c2, D_u, delta_max, N_min of a physics block");
  bounds->add_option("--config", bounds_config, "config JSON")->required()->check(CLI::ExistingFile);

  std::string input;
  std::size_t k = 0;
  std::string basis_name = "fourier";
  std::string selection = "lfb";
  std::string compress_out;
  auto* compress = app.add_subcommand("compress", "compress a trajectory CSV onto K basis paths");
  compress->add_option("--input", input, "trajectory CSV (index,x_m,y_m,z_m,duration_s)")->required()->check(CLI::ExistingFile);
  compress->add_option("--k", k, "basis paths kept")->required();
  compress->add_option("--basis", basis_name, "fourier or shifted-sine");
  compress->add_option("--selection", selection, "lfb, hfb or ssb");
  compress->add_option("--out", compress_out, "write the reconstructed trajectory here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts, axis, values, parallel);
    if (*bounds) return cmd_bounds(bounds_config);
    if (*compress) return cmd_compress(input, k, basis_name, selection, compress_out);
  } catch (const fp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const fp::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kInfeasible;
  } catch (const fp::DecompositionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const fp::CompressionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const fp::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kDegraded;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}
