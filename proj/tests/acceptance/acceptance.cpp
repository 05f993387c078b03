// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/exact_basis.hpp"
#include "../support/oracles.hpp"
#include "flexpath/basis/basis.hpp"
#include "flexpath/discretize/bounds.hpp"
#include "flexpath/discretize/fpd.hpp"
#include "flexpath/discretize/rates.hpp"
#include "flexpath/harness/records.hpp"
#include "flexpath/solver/solver.hpp"

using namespace flexpath;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const char* kPhysics = R"("physics": { "period_s": 100, "v_max_mps": 20, "h_min_m": 100, "beta0_db": -60,
  "noise_dbw": -90, "tx_power_w": 0.2, "e_u_max": 0.05)";

// Runs `flexpath bounds` on a config and returns its key/value lines.
std::map<std::string, std::string> run_bounds(const std::string& cli, const std::string& config_text) {
  const fs::path cfg = fs::temp_directory_path() / "flexpath_acceptance_bounds.json";
  std::ofstream(cfg) << config_text;
  const std::string cmd = "\"" + cli + "\" bounds --config \"" + cfg.string() + "\"";
  std::map<std::string, std::string> out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) {
    std::istringstream line(buf.data());
    std::string key;
    std::string value;
    if (line >> key >> value) out[key] = value;
  }
  const int rc = pclose(pipe);
  if (rc != 0) out["exit"] = std::to_string(rc);
  fs::remove(cfg);
  return out;
}

Outcome criterion1(const std::string& cli) {
  const auto t0 = Clock::now();
  const auto kv = run_bounds(cli, std::string("{") + kPhysics + "}}");
  const double secs = seconds_since(t0);
  if (!kv.count("delta_max_m")) return {false, "bounds printed no delta_max_m"};
  const double d = std::stod(kv.at("delta_max_m"));
  return {d >= 5.40 && d <= 5.43 && secs < 1.0, "delta_max=" + fmt(d) + " m, " + fmt(secs, 3) + " s"};
}

Outcome criterion2(const std::string& cli) {
  const auto t0 = Clock::now();
  const auto kv = run_bounds(cli, std::string("{") + kPhysics + R"(, "delta_max_m": 5 }, "scheme": {"type": "TD"}})");
  const double secs = seconds_since(t0);
  if (!kv.count("td_M") || !kv.count("td_dt_s")) return {false, "bounds printed no TD grid"};
  const long m = std::stol(kv.at("td_M"));
  const double dt = std::stod(kv.at("td_dt_s"));
  return {m == 400 && std::abs(dt - 0.25) < 1e-12 && secs < 1.0,
          "M=" + std::to_string(m) + ", dt=" + fmt(dt) + " s, " + fmt(secs, 3) + " s"};
}

Outcome criterion3() {
  // 15 m at 10 m/s, 4 s hover, back at 5 m/s, on the 0.5 s TD grid.
  PiecewiseTrajectory td;
  auto x_at = [](double t) {
    if (t <= 1.5) return 10.0 * t;
    if (t <= 5.5) return 15.0;
    return 15.0 - 5.0 * (t - 5.5);
  };
  for (int m = 0; m <= 17; ++m) td.waypoints.emplace_back(x_at(0.5 * m), 0.0, 100.0);
  td.durations.assign(17, 0.5);
  const auto cpd = discretize::compress_constant_velocity_runs(td, 5.0);
  const auto fpd = discretize::to_fpd_path(td, 3, 5.0);
  const bool ok = td.waypoints.size() == 18 && cpd.waypoints.size() == 8 && cpd.durations.size() == 7 &&
                  fpd.designable.size() == 4 && fpd.durations.size() == 3;
  return {ok, "TD " + std::to_string(td.waypoints.size()) + ", CPD " + std::to_string(cpd.waypoints.size()) + "+" +
                  std::to_string(cpd.durations.size()) + ", FPD " + std::to_string(fpd.designable.size()) + "+" +
                  std::to_string(fpd.durations.size())};
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  Scenario sc;
  sc.sensors = {{0, 0, 0}};
  sc.tx_powers = {0.2};
  sc.beta0 = 1e-6;
  sc.noise_power = 1e-9;
  const auto b = discretize::derive_bounds(sc, 0.05);
  const double bound = 0.5 * b.d_u * b.delta_max * sc.period;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(-60, 60);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    sc.sensors = {{pos(rng), pos(rng), 0.0}};
    const int n = 20 + trial % 60;
    const double dt = sc.period / n;
    const double cap = std::min(b.delta_max, dt * sc.v_max);
    PiecewiseTrajectory t;
    Eigen::Vector3d q(pos(rng), pos(rng), sc.h_min);
    t.waypoints.emplace_back(q);
    for (int i = 0; i < n; ++i) {
      const double a = ang(rng);
      const double len = cap * frac(rng);
      q += Eigen::Vector3d(len * std::cos(a), len * std::sin(a), 0.0);
      t.waypoints.emplace_back(q);
      t.durations.push_back(dt);
    }
    const auto s = Schedule::constant(1, static_cast<std::size_t>(n), 1.0);
    const double gap = std::abs(discretize::oracle_integrate_rates(t, sc, s)(0) -
                                discretize::finite_sum_rates(t, sc, s)(0)) * sc.period;
    worst = std::max(worst, gap / bound);
    if (gap > bound) ++violations;
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 30.0, std::to_string(violations) + " violations, worst gap/bound " + fmt(worst, 3) +
                                              ", " + fmt(secs, 3) + " s"};
}

Outcome criterion5() {
  using namespace basis;
  for (std::size_t l = 1; l <= 64; ++l) {
    if (flexpath::testing::exact_rank(flexpath::testing::big_fourier(l)) != static_cast<Eigen::Index>(l + 1)) {
      return {false, "rank-deficient Fourier basis at L=" + std::to_string(l)};
    }
  }
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g(0.0, 50.0);
  double worst = 0.0;
  const std::size_t l = 10;
  const auto b = fourier_basis(l);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd q = Eigen::MatrixXd::NullaryExpr(3, l + 1, [&] { return g(rng); });
    worst = std::max(worst, relative_path_error(q, reconstruct(decompose(q, b).entries, b.entries)));
  }
  const Eigen::MatrixXd q = Eigen::MatrixXd::NullaryExpr(3, l + 1, [&] { return g(rng); });
  const auto full = compress(q, b, l + 1, Selection::kLowestFrequency);
  const double exact = relative_path_error(q, full.reconstruct());
  const auto five = compress(q, b, 5, Selection::kLowestFrequency);
  const bool ratio_ok = full.compression_ratio() == 1.0 && std::abs(five.compression_ratio() - 5.0 / 11.0) < 1e-15;
  return {worst <= 1e-8 && exact <= 1e-8 && ratio_ok,
          "full rank L<=64, round trip " + fmt(worst, 3) + " (L=10), K=L+1 error " + fmt(exact, 3)};
}

Outcome criterion6() {
  using namespace basis;
  const std::size_t l = 24;
  auto path = [&](auto f) {
    Eigen::MatrixXd q(3, l + 1);
    for (std::size_t m = 0; m <= l; ++m) {
      const auto p = f(static_cast<double>(m) / l);
      q.col(static_cast<Eigen::Index>(m)) << p[0], p[1], 100.0;
    }
    return q;
  };
  const double tau = 2 * std::numbers::pi;
  const Eigen::MatrixXd circle = path([&](double u) { return std::array{50 * std::cos(tau * u), 50 * std::sin(tau * u)}; });
  const Eigen::MatrixXd s_curve = path([&](double u) { return std::array{80 * u, 30 * std::sin(tau * u)}; });
  const auto f = fourier_basis(l);
  const auto ss = shifted_sine_basis(l);
  bool ok = true;
  std::string detail;
  for (const auto& [name, q] : {std::pair{"circle", circle}, std::pair{"s-curve", s_curve}}) {
    const double lfb = (q - compress(q, f, 10, Selection::kLowestFrequency).reconstruct()).norm();
    const double ssb = (q - compress(q, ss, 10, Selection::kFirstK).reconstruct()).norm();
    const double hfb = (q - compress(q, f, 10, Selection::kHighestFrequency).reconstruct()).norm();
    ok = ok && lfb < ssb && ssb < hfb;
    detail += std::string(detail.empty() ? "" : "; ") + name + " " + fmt(lfb, 3) + " < " + fmt(ssb, 3) + " < " +
              fmt(hfb, 3);
  }
  return {ok, detail};
}

harness::RunConfig desk(std::uint64_t seed, std::size_t sensors, double period) {
  harness::RunConfig c;
  c.generator = harness::SensorGenerator{sensors, 100.0, seed};
  c.physics.period_s = period;
  c.physics.delta_max_m = 5.0;
  c.solver.seed = seed;
  return c;
}

harness::RunRecord solve(harness::RunConfig c, solver::SchemeKind kind, std::size_t n, std::size_t j = 1,
                         std::size_t k = 0, basis::Selection sel = basis::Selection::kLowestFrequency) {
  c.scheme.kind = kind;
  if (kind == solver::SchemeKind::kCpd) {
    c.scheme.n = n;
  } else {
    c.scheme.l = n;
  }
  c.scheme.j = j;
  c.scheme.k = k;
  c.scheme.selection = sel;
  return harness::run(c);
}

Outcome criterion7() {
  using solver::SchemeKind;
  const auto t0 = Clock::now();
  int monotone_bad = 0;
  int failures = 0;
  double worst_cpd = 0.0;
  double worst_pc = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto base = desk(seed, 3, 30.0);
    const auto fpd = solve(base, SchemeKind::kFpd, 15, 2);
    const auto fpd1 = solve(base, SchemeKind::kFpd, 15, 1);
    const auto cpd = solve(base, SchemeKind::kCpd, 15);
    const auto pc = solve(base, SchemeKind::kFpdPc, 15, 2, 16);
    for (const auto* r : {&fpd, &fpd1, &cpd, &pc}) {
      if (!r->ok() || r->degraded) ++failures;
      if (!flexpath::testing::nondecreasing(r->objective_log)) ++monotone_bad;
    }
    worst_cpd = std::max(worst_cpd, std::abs(fpd1.objective - cpd.objective));
    worst_pc = std::max(worst_pc, std::abs(pc.objective - fpd.objective) / fpd.objective);
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && monotone_bad == 0 && worst_cpd <= 1e-6 && worst_pc <= 1e-4 && secs < 300.0,
          std::to_string(monotone_bad) + " nonmonotone logs, |FPD(J=1)-CPD| " + fmt(worst_cpd, 3) +
              ", |PC-FPD|/FPD " + fmt(worst_pc, 3) + ", " + fmt(secs, 3) + " s"};
}

Outcome criterion8() {
  const conic::InteriorPointSolver backend;
  const auto settings = solver::SolverConfig{}.conic_settings();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_sched = 0.0;
  for (const auto& [s, n] : std::vector<std::pair<int, int>>{{1, 4}, {2, 3}, {2, 4}, {3, 2}}) {
    const Eigen::MatrixXd rates = Eigen::MatrixXd::NullaryExpr(s, n, [&] { return u(rng); });
    const Eigen::VectorXd dur = Eigen::VectorXd::NullaryExpr(n, [&] { return 0.5 + u(rng); });
    const double lp = solver::solve_schedule(rates, dur, dur.sum(), backend, settings).objective;
    const double grid = flexpath::testing::schedule_grid_oracle(rates, dur, dur.sum());
    worst_sched = std::max(worst_sched, grid > lp + 1e-7 ? 1.0 : lp - grid);
  }
  double worst_dur = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd coeffs = Eigen::MatrixXd::NullaryExpr(1 + trial % 3, 2, [&] { return u(rng); });
    const Eigen::Vector2d lower(0.3 * u(rng), 0.3 * u(rng));
    const double lp = solver::solve_durations(coeffs, lower, 2.0, backend, settings).objective;
    const double grid = flexpath::testing::duration_grid_oracle(coeffs, lower, 2.0);
    worst_dur = std::max(worst_dur, grid > lp + 1e-7 ? 1.0 : lp - grid);
  }
  double worst_sca = 0.0;
  for (const Eigen::Vector2d w : {Eigen::Vector2d(40, 10), Eigen::Vector2d(-5, 8), Eigen::Vector2d(12, -30)}) {
    solver::ProblemSpec spec;
    spec.scenario.sensors = {{w.x(), w.y(), 0.0}};
    spec.scenario.tx_powers = {0.2};
    spec.scenario.period = 2.0;
    spec.scheme = solver::Scheme::cpd(2);
    spec.delta_max = 100.0;
    auto d = solver::initialize(spec);
    const auto sched = Schedule::constant(1, 2, 1.0);
    for (int it = 0; it < 100; ++it) {
      const auto step = solver::sca_waypoint_step(spec, d, sched, backend);
      d = step.design;
      if (!step.moved) break;
    }
    const double cap = spec.segment_cap(1.0);
    Eigen::Vector2d best(0, 0);
    double best_rate = -1.0;
    for (int x = -25; x <= 25; ++x) {
      for (int y = -25; y <= 25; ++y) {
        if (std::hypot(x, y) > cap) continue;
        const double r = spectral_efficiency({double(x), double(y), 100.0}, spec.scenario.sensors[0], 0.2, 1e-6, 1e-9);
        if (r > best_rate) {
          best_rate = r;
          best = {double(x), double(y)};
        }
      }
    }
    worst_sca = std::max(worst_sca, (Eigen::Vector2d(d.path.designable[1].x, d.path.designable[1].y) - best).norm());
  }
  return {worst_sched <= 0.01 && worst_dur <= 1e-3 && worst_sca <= 2.0,
          "schedule gap " + fmt(worst_sched, 3) + ", duration gap " + fmt(worst_dur, 3) + ", SCA distance " +
              fmt(worst_sca, 3) + " m"};
}

struct Trend {
  Outcome a, b, c, d;
};

Trend criterion9() {
  using solver::SchemeKind;
  using basis::Selection;
  const auto t0 = Clock::now();
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::map<std::string, std::vector<double>> obj;
  std::map<std::string, std::vector<double>> block;
  int failures = 0;
  auto record = [&](const std::string& key, const harness::RunRecord& r) {
    if (!r.ok() || r.degraded) ++failures;
    obj[key].push_back(r.objective);
    block[key].push_back(r.waypoint_block_seconds);
  };
  for (auto seed : seeds) {
    const auto base = desk(seed, 5, 50.0);
    for (std::size_t n : {20u, 40u, 80u}) record("fpd-n" + std::to_string(n), solve(base, SchemeKind::kFpd, n / 2, 2));
    for (std::size_t j : {1u, 4u}) record("fpd-j" + std::to_string(j), solve(base, SchemeKind::kFpd, 40 / j, j));
    for (std::size_t k : {3u, 6u, 12u}) {
      record("lfb-k" + std::to_string(k), solve(base, SchemeKind::kFpdPc, 20, 2, k, Selection::kLowestFrequency));
      record("hfb-k" + std::to_string(k), solve(base, SchemeKind::kFpdPc, 20, 2, k, Selection::kHighestFrequency));
    }
    record("cpd-n40", solve(base, SchemeKind::kCpd, 40));
  }
  obj["fpd-j2"] = obj["fpd-n40"];
  auto m = [&](const std::string& key) { return median(obj[key]); };
  auto mb = [&](const std::string& key) { return median(block[key]); };
  // "within solver noise": the BCD stopping tolerance.
  const double noise = solver::SolverConfig{}.bcd_rel_tol;
  const double secs = seconds_since(t0);
  const bool in_time = secs < 900.0 && failures == 0;
  const std::string tail = ", " + fmt(secs, 3) + " s total";

  Trend t;
  t.a = {in_time && m("fpd-n40") >= m("fpd-n20") * (1 - noise) && m("fpd-n80") >= m("fpd-n40") * (1 - noise),
         "median N=20/40/80: " + fmt(m("fpd-n20")) + " " + fmt(m("fpd-n40")) + " " + fmt(m("fpd-n80")) + tail};
  t.b = {in_time && m("fpd-j1") >= m("fpd-j2") && m("fpd-j2") >= m("fpd-j4"),
         "median J=1/2/4: " + fmt(m("fpd-j1")) + " " + fmt(m("fpd-j2")) + " " + fmt(m("fpd-j4")) + tail};
  bool c_ok = in_time && m("lfb-k6") >= m("lfb-k3") * (1 - noise) && m("lfb-k12") >= m("lfb-k6") * (1 - noise);
  for (const char* k : {"3", "6", "12"}) c_ok = c_ok && m(std::string("lfb-k") + k) >= m(std::string("hfb-k") + k);
  t.c = {c_ok, "median LFB K=3/6/12: " + fmt(m("lfb-k3")) + " " + fmt(m("lfb-k6")) + " " + fmt(m("lfb-k12")) +
                   ", HFB: " + fmt(m("hfb-k3")) + " " + fmt(m("hfb-k6")) + " " + fmt(m("hfb-k12")) + tail};
  t.d = {in_time && mb("lfb-k6") < mb("fpd-n40") && mb("fpd-n40") < mb("cpd-n40"),
         "median waypoint-block s PC(K=6)/FPD(L=20)/CPD(N=40): " + fmt(mb("lfb-k6"), 3) + " " +
             fmt(mb("fpd-n40"), 3) + " " + fmt(mb("cpd-n40"), 3) + tail};
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to flexpath cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  bool all = true;
  auto report = [&](const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << "  " << o.detail << std::endl;
  };
  report("1", [&] { return criterion1(cli); });
  report("2", [&] { return criterion2(cli); });
  report("3", criterion3);
  report("4", criterion4);
  report("5", criterion5);
  report("6", criterion6);
  report("7", criterion7);
  report("8", criterion8);
  Trend t;
  try {
    t = criterion9();
  } catch (const std::exception& e) {
    t.a = t.b = t.c = t.d = {false, std::string("exception: ") + e.what()};
  }
  report("9a", [&] { return t.a; });
  report("9b", [&] { return t.b; });
  report("9c", [&] { return t.c; });
  report("9d", [&] { return t.d; });
  return all ? 0 : 1;
}
