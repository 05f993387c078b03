#include "flexpath/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "flexpath/discretize/bounds.hpp"

namespace flexpath::harness {

using nlohmann::json;

namespace {

// Walks a JSON object, remembering the field path for error messages and
// rejecting keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError((path.empty() ? std::string("config") : path) + ": " + what);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(child(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(child(key), "must be finite");
    return d;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  template <typename Int>
  Int integer(const std::string& key, Int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(child(key), "expected an integer");
    if (std::is_unsigned_v<Int> && v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
      fail(child(key), "must be >= 0");
    }
    return v.get<Int>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (!v.is_string()) fail(child(key), "expected a string");
    return v.get<std::string>();
  }

  // Runs `parse` on the field and prefixes any ConfigError with its path.
  template <typename F>
  auto field(const std::string& key, F parse) {
    try {
      return parse(raw(key));
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.rfind(child(key), 0) == 0) throw;
      fail(child(key), msg);
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(child(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Position3 point_from_json(const json& v, double default_z, const std::string& path) {
  if (v.is_array()) {
    if (v.size() != 2 && v.size() != 3) Reader::fail(path, "expected [x, y] or [x, y, z]");
    for (const auto& e : v) {
      if (!e.is_number()) Reader::fail(path, "coordinates must be numbers");
    }
    return {v[0].get<double>(), v[1].get<double>(), v.size() == 3 ? v[2].get<double>() : default_z};
  }
  if (v.is_object()) {
    Reader r(v, path);
    Position3 p{r.number("x", 0.0), r.number("y", 0.0), r.number("z", default_z)};
    r.finish();
    return p;
  }
  Reader::fail(path, "expected a point");
}

json point_to_json(const Position3& p) { return json::array({p.x, p.y, p.z}); }

std::string block_name(solver::Block b) {
  switch (b) {
    case solver::Block::kSchedule: return "schedule";
    case solver::Block::kDurations: return "durations";
    case solver::Block::kWaypoints: return "waypoints";
  }
  return "unknown";
}

solver::Block block_from_string(const std::string& name) {
  if (name == "schedule") return solver::Block::kSchedule;
  if (name == "durations") return solver::Block::kDurations;
  if (name == "waypoints") return solver::Block::kWaypoints;
  throw ConfigError("unknown block '" + name + "'");
}

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNFpd: return "N_FPD";
    case SweepAxis::kJ: return "J";
    case SweepAxis::kK: return "K";
    case SweepAxis::kScheme: return "scheme";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (n == "n_fpd" || n == "nfpd" || n == "n") return SweepAxis::kNFpd;
  if (n == "j") return SweepAxis::kJ;
  if (n == "k") return SweepAxis::kK;
  if (n == "scheme") return SweepAxis::kScheme;
  throw ConfigError("unknown sweep axis '" + name + "'");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void RunConfig::validate() const {
  if (sensors.has_value() == generator.has_value()) {
    throw ConfigError("scenario: give exactly one of 'sensors' and 'generator'");
  }
  if (tx_powers && !sensors) throw ConfigError("scenario.tx_powers_w: only valid with an explicit sensor list");
  if (tx_powers && sensors && tx_powers->size() != sensors->size()) {
    throw ConfigError("scenario.tx_powers_w: needs one power per sensor");
  }
  if (generator) {
    if (generator->count < 1) throw ConfigError("scenario.generator.count: must be >= 1");
    if (!(generator->side_m > 0.0)) throw ConfigError("scenario.generator.side_m: must be positive");
  }
  if (sensors && sensors->empty()) throw ConfigError("scenario.sensors: empty list");
  const PhysicsConfig& p = physics;
  if (!(p.period_s > 0.0)) throw ConfigError("physics.period_s: must be positive");
  if (!(p.v_max_mps > 0.0)) throw ConfigError("physics.v_max_mps: must be positive");
  if (!(p.h_min_m > 0.0)) throw ConfigError("physics.h_min_m: must be positive");
  if (!(p.tx_power_w > 0.0)) throw ConfigError("physics.tx_power_w: must be positive");
  if (p.e_u_max && !(*p.e_u_max > 0.0)) throw ConfigError("physics.e_u_max: must be positive");
  if (p.delta_max_m && !(*p.delta_max_m > 0.0)) throw ConfigError("physics.delta_max_m: must be positive");
  if (!p.e_u_max && !p.delta_max_m) throw ConfigError("physics: set e_u_max, delta_max_m or both");
  if (!(p.epsilon_robust >= 0.0)) throw ConfigError("physics.epsilon_robust: must be >= 0");
  if (repetitions < 1) throw ConfigError("repetitions: must be >= 1");
  const SchemeConfig& s = scheme;
  using solver::SchemeKind;
  if (s.kind == SchemeKind::kCpd && s.n < 1) throw ConfigError("scheme.N: must be >= 1");
  if ((s.kind == SchemeKind::kFpd || s.kind == SchemeKind::kFpdPc) && (s.l < 1 || s.j < 1)) {
    throw ConfigError("scheme: L and J must be >= 1");
  }
  if (s.kind == SchemeKind::kFpdPc && (s.k < 1 || s.k > s.l + 1)) throw ConfigError("scheme.K: needs 1 <= K <= L+1");
  try {
    solver.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Reader top(j, "");
  double h_min = 100.0;

  if (top.has("physics")) {
    Reader r(top.raw("physics"), "physics");
    PhysicsConfig& p = c.physics;
    p.period_s = r.number("period_s", p.period_s);
    p.v_max_mps = r.number("v_max_mps", p.v_max_mps);
    p.h_min_m = r.number("h_min_m", p.h_min_m);
    p.beta0_db = r.number("beta0_db", p.beta0_db);
    p.noise_dbw = r.number("noise_dbw", p.noise_dbw);
    p.tx_power_w = r.number("tx_power_w", p.tx_power_w);
    p.e_u_max = r.optional_number("e_u_max");
    p.delta_max_m = r.optional_number("delta_max_m");
    p.epsilon_robust = r.number("epsilon_robust", p.epsilon_robust);
    r.finish();
    h_min = p.h_min_m;
  }

  if (top.has("scenario")) {
    Reader r(top.raw("scenario"), "scenario");
    if (r.has("sensors")) {
      const json& list = r.raw("sensors");
      if (!list.is_array()) Reader::fail("scenario.sensors", "expected a list of points");
      std::vector<Position3> pts;
      for (std::size_t i = 0; i < list.size(); ++i) {
        pts.push_back(point_from_json(list[i], 0.0, "scenario.sensors[" + std::to_string(i) + "]"));
      }
      c.sensors = std::move(pts);
    }
    if (r.has("tx_powers_w")) {
      const json& list = r.raw("tx_powers_w");
      if (!list.is_array()) Reader::fail("scenario.tx_powers_w", "expected a list of numbers");
      std::vector<double> pw;
      for (const auto& v : list) {
        if (!v.is_number()) Reader::fail("scenario.tx_powers_w", "expected numbers");
        pw.push_back(v.get<double>());
      }
      c.tx_powers = std::move(pw);
    }
    if (r.has("generator")) {
      Reader g(r.raw("generator"), "scenario.generator");
      SensorGenerator gen;
      gen.count = g.integer<std::size_t>("count", gen.count);
      gen.side_m = g.number("side_m", gen.side_m);
      gen.seed = g.integer<std::uint64_t>("seed", gen.seed);
      g.finish();
      c.generator = gen;
    }
    if (r.has("q_start")) c.q_start = point_from_json(r.raw("q_start"), h_min, "scenario.q_start");
    if (r.has("q_end")) c.q_end = point_from_json(r.raw("q_end"), h_min, "scenario.q_end");
    r.finish();
  }

  if (top.has("scheme")) {
    Reader r(top.raw("scheme"), "scheme");
    SchemeConfig& s = c.scheme;
    s.kind = r.field("type", [](const json& v) {
      if (!v.is_string()) throw ConfigError("expected TD, CPD, FPD or FPD-PC");
      return solver::scheme_kind_from_string(v.get<std::string>());
    });
    s.m = r.integer<std::size_t>("M", s.m);
    s.n = r.integer<std::size_t>("N", s.n);
    s.l = r.integer<std::size_t>("L", s.l);
    s.j = r.integer<std::size_t>("J", s.j);
    s.k = r.integer<std::size_t>("K", s.k);
    if (r.has("basis")) s.basis = r.field("basis", [](const json& v) { return basis::basis_kind_from_string(v.get<std::string>()); });
    if (r.has("selection")) {
      s.selection = r.field("selection", [](const json& v) { return basis::selection_from_string(v.get<std::string>()); });
    }
    r.finish();
  }

  if (top.has("solver")) {
    Reader r(top.raw("solver"), "solver");
    solver::SolverConfig& s = c.solver;
    s.bcd_max_iters = r.integer<int>("bcd_max_iters", s.bcd_max_iters);
    s.bcd_rel_tol = r.number("bcd_rel_tol", s.bcd_rel_tol);
    s.sca_max_iters = r.integer<int>("sca_max_iters", s.sca_max_iters);
    s.sca_rel_tol = r.number("sca_rel_tol", s.sca_rel_tol);
    s.conic_kkt_tol = r.number("conic_kkt_tol", s.conic_kkt_tol);
    s.seed = r.integer<std::uint64_t>("seed", s.seed);
    if (r.has("block_order")) {
      s.block_order = r.field("block_order", [](const json& v) {
        if (!v.is_array()) throw ConfigError("expected a list of block names");
        std::vector<solver::Block> order;
        for (const auto& b : v) order.push_back(block_from_string(b.get<std::string>()));
        return order;
      });
    }
    if (r.has("surrogate_form")) {
      s.surrogate_form =
          r.field("surrogate_form", [](const json& v) { return solver::surrogate_form_from_string(v.get<std::string>()); });
    }
    s.aggregated_max_vars = r.integer<int>("aggregated_max_vars", s.aggregated_max_vars);
    r.finish();
  }

  if (top.has("sweep")) {
    Reader r(top.raw("sweep"), "sweep");
    SweepConfig sw;
    sw.axis = r.field("axis", [](const json& v) { return sweep_axis_from_string(v.get<std::string>()); });
    if (r.has("values")) {
      const json& vals = r.raw("values");
      if (!vals.is_array() || vals.empty()) Reader::fail("sweep.values", "expected a non-empty list");
      for (const auto& v : vals) sw.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
    r.finish();
    c.sweep = sw;
  }

  c.output = top.text("output", c.output);
  c.repetitions = top.integer<int>("repetitions", c.repetitions);
  if (top.has("seed")) {
    const auto seed = top.integer<std::uint64_t>("seed", 1);
    if (c.generator) c.generator->seed = seed;
    c.solver.seed = seed;
  }
  top.finish();
  c.validate();
  return c;
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << "config: JSON syntax error at line " << line << ", column " << col << ": " << e.what();
    throw ConfigError(os.str());
  }
  try {
    return run_config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

json to_json(const RunConfig& c) {
  json j;
  json scen = json::object();
  if (c.sensors) {
    json list = json::array();
    for (const auto& p : *c.sensors) list.push_back(point_to_json(p));
    scen["sensors"] = list;
  }
  if (c.tx_powers) scen["tx_powers_w"] = *c.tx_powers;
  if (c.generator) {
    scen["generator"] = {{"count", c.generator->count}, {"side_m", c.generator->side_m}, {"seed", c.generator->seed}};
  }
  if (c.q_start) scen["q_start"] = point_to_json(*c.q_start);
  if (c.q_end) scen["q_end"] = point_to_json(*c.q_end);
  j["scenario"] = scen;

  const PhysicsConfig& p = c.physics;
  j["physics"] = {{"period_s", p.period_s},   {"v_max_mps", p.v_max_mps},   {"h_min_m", p.h_min_m},
                  {"beta0_db", p.beta0_db},   {"noise_dbw", p.noise_dbw},   {"tx_power_w", p.tx_power_w},
                  {"epsilon_robust", p.epsilon_robust}};
  if (p.e_u_max) j["physics"]["e_u_max"] = *p.e_u_max;
  if (p.delta_max_m) j["physics"]["delta_max_m"] = *p.delta_max_m;

  const SchemeConfig& s = c.scheme;
  j["scheme"] = {{"type", solver::to_string(s.kind)}, {"M", s.m}, {"N", s.n}, {"L", s.l}, {"J", s.j}, {"K", s.k},
                 {"basis", basis::to_string(s.basis)}, {"selection", basis::to_string(s.selection)}};

  const solver::SolverConfig& sv = c.solver;
  json order = json::array();
  for (const auto b : sv.block_order) order.push_back(block_name(b));
  j["solver"] = {{"bcd_max_iters", sv.bcd_max_iters},   {"bcd_rel_tol", sv.bcd_rel_tol},
                 {"sca_max_iters", sv.sca_max_iters},   {"sca_rel_tol", sv.sca_rel_tol},
                 {"conic_kkt_tol", sv.conic_kkt_tol},   {"seed", sv.seed},
                 {"block_order", order},                {"surrogate_form", solver::to_string(sv.surrogate_form)},
                 {"aggregated_max_vars", sv.aggregated_max_vars}};
  if (c.sweep) j["sweep"] = {{"axis", to_string(c.sweep->axis)}, {"values", c.sweep->values}};
  j["output"] = c.output;
  j["repetitions"] = c.repetitions;
  return j;
}

Scenario build_scenario(const RunConfig& c) {
  Scenario sc;
  const PhysicsConfig& p = c.physics;
  sc.beta0 = db_to_linear(p.beta0_db);
  sc.noise_power = db_to_linear(p.noise_dbw);
  sc.h_min = p.h_min_m;
  sc.v_max = p.v_max_mps;
  sc.period = p.period_s;
  sc.epsilon_robust = p.epsilon_robust;
  sc.q_start = c.q_start.value_or(Position3{0.0, 0.0, p.h_min_m});
  sc.q_end = c.q_end.value_or(sc.q_start);
  if (c.sensors) {
    sc.sensors = *c.sensors;
    sc.tx_powers = c.tx_powers.value_or(std::vector<double>(sc.sensors.size(), p.tx_power_w));
  } else {
    std::mt19937_64 rng(c.generator->seed);
    std::uniform_real_distribution<double> u(0.0, c.generator->side_m);
    for (std::size_t s = 0; s < c.generator->count; ++s) {
      const double x = u(rng);
      const double y = u(rng);
      sc.sensors.emplace_back(x, y, 0.0);
    }
    sc.tx_powers.assign(sc.sensors.size(), p.tx_power_w);
  }
  sc.validate();
  return sc;
}

Derived derive(const RunConfig& c, const Scenario& sc) {
  Derived d;
  const auto steep = discretize::compute_c1_c2(sc);
  d.c1_m = steep.c1;
  d.c2 = steep.c2;
  d.d_u = discretize::compute_du(sc);
  if (c.physics.e_u_max) d.delta_max_derived_m = discretize::derive_bounds(sc, *c.physics.e_u_max).delta_max;
  if (c.physics.delta_max_m) {
    d.delta_max_m = *c.physics.delta_max_m;
  } else if (d.delta_max_derived_m) {
    d.delta_max_m = *d.delta_max_derived_m;
  } else {
    throw ConfigError("physics: set e_u_max, delta_max_m or both");
  }
  const auto grid = discretize::make_td_grid(sc, d.delta_max_m);
  d.m_td = grid.m;
  d.dt_s = grid.dt;
  d.n_min = discretize::compute_n_min(sc.q_start, sc.q_end, d.delta_max_m);
  const solver::Scheme scheme = make_scheme(c.scheme, d);
  d.design_variables = scheme.design_variables();
  if (scheme.kind == solver::SchemeKind::kFpdPc) {
    d.rho_comp = static_cast<double>(scheme.k) / static_cast<double>(scheme.segments + 1);
  }
  return d;
}

solver::Scheme make_scheme(const SchemeConfig& s, const Derived& d) {
  switch (s.kind) {
    case solver::SchemeKind::kTd: return solver::Scheme::td(s.m ? s.m : d.m_td);
    case solver::SchemeKind::kCpd: return solver::Scheme::cpd(s.n);
    case solver::SchemeKind::kFpd: return solver::Scheme::fpd(s.l, s.j);
    case solver::SchemeKind::kFpdPc: return solver::Scheme::fpd_pc(s.l, s.j, s.k, s.basis, s.selection);
  }
  throw ConfigError("scheme: unknown type");
}

solver::ProblemSpec make_problem(const RunConfig& c) {
  solver::ProblemSpec spec;
  spec.scenario = build_scenario(c);
  const Derived d = derive(c, spec.scenario);
  spec.scheme = make_scheme(c.scheme, d);
  spec.delta_max = d.delta_max_m;
  spec.config = c.solver;
  spec.validate();
  return spec;
}

}  // namespace flexpath::harness
