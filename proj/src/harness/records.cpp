#include "flexpath/harness/records.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "flexpath/solver/solver.hpp"

#ifndef FLEXPATH_VERSION
#define FLEXPATH_VERSION "0.0.0"
#endif

namespace flexpath::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (j.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

json points_to_json(const std::vector<Position3>& pts) {
  json list = json::array();
  for (const auto& p : pts) list.push_back({p.x, p.y, p.z});
  return list;
}

std::vector<Position3> points_from_json(const json& j) {
  std::vector<Position3> pts;
  for (const auto& p : j) pts.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  return pts;
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string scheme_tag(const solver::Scheme& s) {
  std::ostringstream os;
  switch (s.kind) {
    case solver::SchemeKind::kTd: os << "td-M" << s.segments; break;
    case solver::SchemeKind::kCpd: os << "cpd-N" << s.segments; break;
    case solver::SchemeKind::kFpd: os << "fpd-L" << s.segments << "-J" << s.j; break;
    case solver::SchemeKind::kFpdPc:
      os << "fpdpc-L" << s.segments << "-J" << s.j << "-K" << s.k << "-" << basis::to_string(s.basis) << "-"
         << basis::to_string(s.selection);
      break;
  }
  return os.str();
}

std::uint64_t scenario_seed(const RunConfig& c) { return c.generator ? c.generator->seed : c.solver.seed; }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string status_of(const RunRecord& r) {
  if (!r.ok()) return "failed:" + r.error_kind + ": " + r.error;
  return r.degraded ? "degraded: " + r.status : "ok";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << std::setprecision(17);
  return out;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const InfeasibleError*>(&e)) return "infeasible";
  if (dynamic_cast<const SolverError*>(&e)) return "solver";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal";
}

RunRecord failed_record(const RunConfig& c, const std::string& run_id, const std::exception& e) {
  RunRecord r;
  r.run_id = run_id;
  r.config = c;
  r.error = e.what();
  r.error_kind = error_kind(e);
  r.status = "failed";
  r.version = FLEXPATH_VERSION;
  r.timestamp = timestamp_utc();
  return r;
}

}  // namespace

json to_json(const RunRecord& r) {
  json d = {{"delta_max_derived_m", opt(r.derived.delta_max_derived_m)},
            {"delta_max_m", r.derived.delta_max_m},
            {"c1_m", r.derived.c1_m},
            {"c2", r.derived.c2},
            {"d_u", r.derived.d_u},
            {"dt_s", r.derived.dt_s},
            {"m_td", r.derived.m_td},
            {"n_min", r.derived.n_min},
            {"rho_comp", opt(r.derived.rho_comp)},
            {"design_variables", r.derived.design_variables}};
  json traj = {{"waypoints", points_to_json(r.trajectory.waypoints)}, {"durations", r.trajectory.durations}};
  return {{"run_id", r.run_id},
          {"config", to_json(r.config)},
          {"derived", d},
          {"sensor_rng", r.sensor_rng},
          {"sensors", points_to_json(r.sensors)},
          {"stream_seed", r.stream_seed},
          {"objective_bps_hz", r.objective},
          {"rates_bps_hz", r.rates},
          {"min_sensor", r.min_sensor},
          {"iterations", r.iterations},
          {"wall_seconds", r.wall_seconds},
          {"waypoint_block_seconds", r.waypoint_block_seconds},
          {"objective_log", r.objective_log},
          {"status", r.status},
          {"degraded", r.degraded},
          {"error", r.error},
          {"error_kind", r.error_kind},
          {"trajectory", traj},
          {"schedule", matrix_to_json(r.schedule)},
          {"coeffs", matrix_to_json(r.coeffs)},
          {"version", r.version},
          {"timestamp", r.timestamp}};
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.config = run_config_from_json(j.at("config"));
  const json& d = j.at("derived");
  r.derived.delta_max_derived_m = opt_from<double>(d, "delta_max_derived_m");
  r.derived.delta_max_m = d.at("delta_max_m");
  r.derived.c1_m = d.at("c1_m");
  r.derived.c2 = d.at("c2");
  r.derived.d_u = d.at("d_u");
  r.derived.dt_s = d.at("dt_s");
  r.derived.m_td = d.at("m_td");
  r.derived.n_min = d.at("n_min");
  r.derived.rho_comp = opt_from<double>(d, "rho_comp");
  r.derived.design_variables = d.at("design_variables");
  r.sensor_rng = j.at("sensor_rng");
  r.sensors = points_from_json(j.at("sensors"));
  r.stream_seed = j.at("stream_seed");
  r.objective = j.at("objective_bps_hz");
  r.rates = j.at("rates_bps_hz").get<std::vector<double>>();
  r.min_sensor = j.at("min_sensor");
  r.iterations = j.at("iterations");
  r.wall_seconds = j.at("wall_seconds");
  r.waypoint_block_seconds = j.at("waypoint_block_seconds");
  r.objective_log = j.at("objective_log").get<std::vector<double>>();
  r.status = j.at("status");
  r.degraded = j.at("degraded");
  r.error = j.at("error");
  r.error_kind = j.at("error_kind");
  r.trajectory.waypoints = points_from_json(j.at("trajectory").at("waypoints"));
  r.trajectory.durations = j.at("trajectory").at("durations").get<std::vector<double>>();
  r.schedule = matrix_from_json(j.at("schedule"));
  r.coeffs = matrix_from_json(j.at("coeffs"));
  r.version = j.at("version");
  r.timestamp = j.at("timestamp");
  return r;
}

RunRecord run(const RunConfig& config) {
  config.validate();
  const solver::ProblemSpec spec = make_problem(config);
  RunRecord r;
  r.config = config;
  r.derived = derive(config, spec.scenario);
  r.sensors = spec.scenario.sensors;
  r.run_id = scheme_tag(spec.scheme) + "-seed" + std::to_string(scenario_seed(config));
  r.stream_seed = config.solver.seed;

  const solver::Solution sol = solver::bcd_solve(spec);
  r.objective = sol.objective;
  r.rates.assign(sol.rates.data(), sol.rates.data() + sol.rates.size());
  r.min_sensor = sol.min_sensor;
  r.iterations = sol.iterations;
  r.wall_seconds = sol.wall_seconds;
  r.waypoint_block_seconds = sol.waypoint_block_seconds;
  r.objective_log = sol.objective_log;
  r.status = sol.status;
  r.degraded = sol.degraded;
  r.trajectory = sol.trajectory;
  r.schedule = sol.schedule.alpha;
  r.coeffs = sol.coeffs;
  r.version = FLEXPATH_VERSION;
  r.timestamp = timestamp_utc();
  return r;
}

std::vector<RunRecord> run_repeated(const RunConfig& config) {
  std::vector<RunRecord> out;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    RunConfig c = config;
    if (c.generator) c.generator->seed += static_cast<std::uint64_t>(rep);
    c.solver.seed += static_cast<std::uint64_t>(rep);
    out.push_back(run(c));
  }
  return out;
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

RunConfig sweep_point(const RunConfig& base, SweepAxis axis, const std::string& value) {
  RunConfig c = base;
  c.sweep.reset();
  SchemeConfig& s = c.scheme;
  using solver::SchemeKind;
  const auto as_count = [&](const std::string& v) -> std::size_t {
    std::size_t pos = 0;
    long long n = 0;
    try {
      n = std::stoll(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != v.size() || n < 1) throw ConfigError("sweep value '" + v + "' is not a positive integer");
    return static_cast<std::size_t>(n);
  };
  switch (axis) {
    case SweepAxis::kNFpd: {
      const std::size_t n = as_count(value);
      if (s.kind == SchemeKind::kTd) {
        s.m = n;
      } else if (s.kind == SchemeKind::kCpd) {
        s.n = n;
      } else {
        if (n % s.j != 0) throw ConfigError("N_FPD = " + value + " is not a multiple of J = " + std::to_string(s.j));
        s.l = n / s.j;
      }
      break;
    }
    case SweepAxis::kJ: {
      if (s.kind != SchemeKind::kFpd && s.kind != SchemeKind::kFpdPc) throw ConfigError("J sweep needs FPD or FPD-PC");
      const std::size_t j = as_count(value);
      const std::size_t n_fpd = s.l * s.j;
      if (n_fpd % j != 0) {
        throw ConfigError("J = " + value + " does not divide N_FPD = " + std::to_string(n_fpd));
      }
      s.j = j;
      s.l = n_fpd / j;
      break;
    }
    case SweepAxis::kK:
      if (s.kind != SchemeKind::kFpdPc) throw ConfigError("K sweep needs FPD-PC");
      s.k = as_count(value);
      break;
    case SweepAxis::kScheme: s.kind = solver::scheme_kind_from_string(value); break;
  }
  c.validate();
  return c;
}

SweepResult sweep(const RunConfig& base, SweepAxis axis, const std::vector<std::string>& values, int parallel) {
  if (values.empty()) throw ConfigError("sweep: no values");
  base.validate();
  SweepResult out;
  out.axis_values = values;
  out.records.resize(values.size());
  const auto count = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(parallel, 1))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const std::string point_id = "p" + std::to_string(idx) + "-" + to_string(axis) + "=" + values[idx];
    RunConfig c = base;
    try {
      c = sweep_point(base, axis, values[idx]);
      c.solver.seed = stream_seed(base.solver.seed, idx);
      RunRecord r = run(c);
      r.run_id = point_id + "-" + r.run_id;
      out.records[idx] = std::move(r);
    } catch (const std::exception& e) {
      out.records[idx] = failed_record(c, point_id, e);
    }
    out.records[idx].stream_seed = stream_seed(base.solver.seed, idx);
  }
  return out;
}

Format format_from_string(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "jsonl" || name == "json-lines") return Format::kJsonLines;
  throw ConfigError("unknown format '" + name + "' (csv or jsonl)");
}

std::string results_csv_row(const RunRecord& r) {
  std::ostringstream os;
  std::string m, n, l, j, k;
  if (r.ok()) {
    const solver::Scheme s = make_scheme(r.config.scheme, r.derived);
    switch (s.kind) {
      case solver::SchemeKind::kTd: m = std::to_string(s.segments); break;
      case solver::SchemeKind::kCpd: n = std::to_string(s.segments); break;
      case solver::SchemeKind::kFpdPc: k = std::to_string(s.k); [[fallthrough]];
      case solver::SchemeKind::kFpd:
        l = std::to_string(s.segments);
        j = std::to_string(s.j);
        break;
    }
  }
  os << csv_field(r.run_id) << ',' << solver::to_string(r.config.scheme.kind) << ',' << m << ',' << n << ',' << l << ','
     << j << ',' << k << ',';
  if (r.ok()) {
    os << fmt(r.derived.delta_max_m) << ',' << fmt(r.objective) << ',' << r.min_sensor << ',' << r.iterations << ','
       << fmt(r.wall_seconds * 1e3);
  } else {
    os << ",,,,";
  }
  os << ',' << csv_field(status_of(r));
  return os.str();
}

void write_trajectory_csv(const PiecewiseTrajectory& traj, const std::string& path) {
  auto out = open_out(path);
  out << "index,x_m,y_m,z_m,duration_s\n";
  for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
    const auto& p = traj.waypoints[i];
    out << i << ',' << p.x << ',' << p.y << ',' << p.z << ',';
    if (i < traj.durations.size()) out << traj.durations[i];
    out << '\n';
  }
  if (!out) throw Error("failed writing '" + path + "'");
}

PiecewiseTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read trajectory file '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("index,x_m,y_m,z_m,duration_s", 0) != 0) {
    throw ConfigError(path + ":1: expected header index,x_m,y_m,z_m,duration_s");
  }
  PiecewiseTrajectory traj;
  std::vector<std::string> pending_duration;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 5) throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 5 fields");
    try {
      traj.waypoints.emplace_back(std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3]));
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": bad coordinate");
    }
    pending_duration.push_back(cells[4]);
  }
  if (traj.waypoints.size() < 2) throw ConfigError(path + ": needs at least two waypoints");
  for (std::size_t i = 0; i + 1 < pending_duration.size(); ++i) {
    try {
      traj.durations.push_back(std::stod(pending_duration[i]));
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(i + 2) + ": bad duration");
    }
  }
  return traj;
}

void write_schedule_csv(const Eigen::MatrixXd& alpha, const std::string& path) {
  auto out = open_out(path);
  out << "segment,sensor,alpha\n";
  for (Eigen::Index n = 0; n < alpha.cols(); ++n) {
    for (Eigen::Index s = 0; s < alpha.rows(); ++s) out << n << ',' << s << ',' << alpha(s, n) << '\n';
  }
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<std::string> emit(const std::vector<RunRecord>& records, const std::string& dir, Format format) {
  if (records.empty()) throw Error("nothing to emit: no records");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  const std::string main_path =
      (fs::path(dir) / (format == Format::kCsv ? "results.csv" : "results.jsonl")).string();
  {
    auto out = open_out(main_path);
    if (format == Format::kCsv) {
      const auto& cols = results_columns();
      for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
      out << '\n';
      for (const auto& r : records) out << results_csv_row(r) << '\n';
    } else {
      for (const auto& r : records) out << to_json(r).dump() << '\n';
    }
    if (!out) throw Error("failed writing '" + main_path + "'");
  }
  written.push_back(main_path);
  for (const auto& r : records) {
    if (!r.ok()) continue;
    const std::string t = (fs::path(dir) / (r.run_id + "_trajectory.csv")).string();
    const std::string s = (fs::path(dir) / (r.run_id + "_schedule.csv")).string();
    write_trajectory_csv(r.trajectory, t);
    write_schedule_csv(r.schedule, s);
    written.push_back(t);
    written.push_back(s);
  }
  return written;
}

std::string emit_sweep_summary(const SweepResult& result, SweepAxis axis, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  const std::string path = (fs::path(dir) / "sweep_summary.csv").string();
  auto out = open_out(path);
  out << "axis,axis_value,design_variables,objective_bps_hz,wall_ms,iterations,status\n";
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const RunRecord& r = result.records[i];
    out << to_string(axis) << ',' << csv_field(result.axis_values[i]) << ',';
    if (r.ok()) {
      out << r.derived.design_variables << ',' << fmt(r.objective) << ',' << fmt(r.wall_seconds * 1e3) << ','
          << r.iterations;
    } else {
      out << ",,,";
    }
    out << ',' << csv_field(status_of(r)) << '\n';
  }
  if (!out) throw Error("failed writing '" + path + "'");
  return path;
}

std::vector<RunRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::vector<RunRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace flexpath::harness
