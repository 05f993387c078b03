#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "flexpath/discretize/bounds.hpp"
#include "flexpath/harness/records.hpp"

using namespace flexpath;
using namespace flexpath::harness;
namespace fs = std::filesystem;

namespace {

const char* kDesk = R"({
  "scenario": { "generator": { "count": 3, "side_m": 100, "seed": 4 } },
  "physics": { "period_s": 30, "v_max_mps": 20, "h_min_m": 100, "beta0_db": -60, "noise_dbw": -90,
               "tx_power_w": 0.2, "delta_max_m": 5 },
  "scheme": { "type": "FPD", "L": 10, "J": 2 }
})";

std::string error_of(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("flexpath_test_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Config, DecibelConversion) {
  EXPECT_DOUBLE_EQ(db_to_linear(-60.0), 1e-6);
  EXPECT_DOUBLE_EQ(db_to_linear(-90.0), 1e-9);
  EXPECT_DOUBLE_EQ(db_to_linear(0.0), 1.0);
  const Scenario sc = build_scenario(parse_run_config(kDesk));
  EXPECT_NEAR(sc.beta0, 1e-6, 1e-20);
  EXPECT_NEAR(sc.noise_power, 1e-9, 1e-23);
  EXPECT_NEAR(sc.snr_scale(0), 200.0, 1e-9);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
  const std::string msg = error_of("{\n  \"physics\": {\n    \"period_s\": 30,,\n  }\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(Config, FieldErrorsNameThePath) {
  EXPECT_NE(error_of(R"({"physics": {"period_s": "long"}})").find("physics.period_s"), std::string::npos);
  EXPECT_NE(error_of(R"({"physics": {"perod_s": 3}})").find("physics.perod_s"), std::string::npos);
  std::string bad_k = kDesk;
  bad_k.replace(bad_k.find(R"("type": "FPD", "L": 10)"), 22, R"("type": "FPD-PC", "L": 4, "K": 9)");
  EXPECT_NE(error_of(bad_k).find("scheme.K"), std::string::npos) << error_of(bad_k);
  EXPECT_NE(error_of(R"({"scenario": {"sensors": [[0, 0]], "generator": {"count": 2}}})").find("exactly one"),
            std::string::npos);
}

TEST(Config, JsonRoundTrip) {
  const RunConfig c = parse_run_config(kDesk);
  EXPECT_EQ(to_json(run_config_from_json(to_json(c))), to_json(c));
}

TEST(Derived, MatchesRecomputation) {
  RunConfig c = parse_run_config(R"({
    "scenario": { "generator": { "count": 2 } },
    "physics": { "e_u_max": 0.05 },
    "scheme": { "type": "TD" }
  })");
  const Scenario sc = build_scenario(c);
  const Derived d = derive(c, sc);
  const auto cc = discretize::compute_c1_c2(sc);
  const double du = discretize::compute_du(cc, sc.h_min);
  ASSERT_TRUE(d.delta_max_derived_m.has_value());
  EXPECT_NEAR(*d.delta_max_derived_m, discretize::compute_delta_max(0.05, sc.period, du), 1e-12);
  EXPECT_GE(*d.delta_max_derived_m, 5.40);
  EXPECT_LE(*d.delta_max_derived_m, 5.43);
  EXPECT_EQ(d.delta_max_m, *d.delta_max_derived_m);
  EXPECT_EQ(d.m_td, static_cast<std::size_t>(std::ceil(sc.period * sc.v_max / d.delta_max_m)));

  c.physics.delta_max_m = 5.0;
  const Derived d5 = derive(c, sc);
  EXPECT_EQ(d5.delta_max_m, 5.0);
  EXPECT_EQ(d5.m_td, 400u);
  EXPECT_DOUBLE_EQ(d5.dt_s, 0.25);
}

TEST(Run, SameSeedSameBits) {
  const RunConfig c = parse_run_config(kDesk);
  const RunRecord a = run(c);
  const RunRecord b = run(c);
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.rates, b.rates);
  EXPECT_EQ(a.objective_log, b.objective_log);
  EXPECT_EQ(a.schedule, b.schedule);
  EXPECT_EQ(a.sensor_rng, "std::mt19937_64");
  EXPECT_EQ(a.sensors.size(), 3u);
}

TEST(Run, RecordJsonRoundTrip) {
  const RunRecord a = run(parse_run_config(kDesk));
  const auto j = to_json(a);
  EXPECT_EQ(to_json(record_from_json(j)), j);
  EXPECT_EQ(record_from_json(j).objective, a.objective);
}

TEST(Run, InfeasibleConfigRejectedBeforeSolving) {
  RunConfig c = parse_run_config(kDesk);
  c.q_end = Position3{5000.0, 0.0, 100.0};
  EXPECT_THROW(run(c), Error);
}

TEST(Emit, EmptyInputCreatesNothing) {
  const fs::path dir = fresh_dir("empty");
  EXPECT_THROW(emit({}, dir.string(), Format::kCsv), Error);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Emit, OneRecordIsHeaderPlusRow) {
  const RunRecord r = run(parse_run_config(kDesk));
  const fs::path dir = fresh_dir("one");
  emit({r}, dir.string(), Format::kCsv);
  const auto lines = lines_of(dir / "results.csv");
  ASSERT_EQ(lines.size(), 2u);
  std::string header;
  for (const auto& c : results_columns()) header += (header.empty() ? "" : ",") + c;
  EXPECT_EQ(lines[0], header);
  EXPECT_EQ(lines[1], results_csv_row(r));

  const PiecewiseTrajectory back = read_trajectory_csv((dir / (r.run_id + "_trajectory.csv")).string());
  ASSERT_EQ(back.waypoints.size(), r.trajectory.waypoints.size());
  for (std::size_t i = 0; i < back.waypoints.size(); ++i) {
    EXPECT_EQ(back.waypoints[i].vec(), r.trajectory.waypoints[i].vec());
  }
  EXPECT_EQ(back.durations, r.trajectory.durations);
  EXPECT_TRUE(fs::exists(dir / (r.run_id + "_schedule.csv")));
  fs::remove_all(dir);
}

TEST(Emit, JsonLinesRoundTrip) {
  const RunRecord r = run(parse_run_config(kDesk));
  const fs::path dir = fresh_dir("jsonl");
  emit({r, r}, dir.string(), Format::kJsonLines);
  const auto back = read_jsonl((dir / "results.jsonl").string());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(to_json(back[0]), to_json(r));
  fs::remove_all(dir);
}

TEST(Sweep, AxisOrderAndFlaggedFailures) {
  const RunConfig base = parse_run_config(kDesk);
  const auto res = sweep(base, SweepAxis::kJ, {"4", "0", "1", "2"}, 2);
  ASSERT_EQ(res.records.size(), 4u);
  EXPECT_EQ(res.axis_values, (std::vector<std::string>{"4", "0", "1", "2"}));
  EXPECT_TRUE(res.records[0].ok());
  EXPECT_FALSE(res.records[1].ok());
  EXPECT_EQ(res.records[1].error_kind, "config");
  EXPECT_TRUE(res.records[2].ok());
  EXPECT_EQ(res.records[2].config.scheme.j, 1u);
  EXPECT_EQ(res.records[3].config.scheme.j, 2u);
  for (const auto& r : res.records) {
    if (r.ok()) EXPECT_EQ(r.sensors, res.records[0].sensors);
  }

  const fs::path dir = fresh_dir("sweep");
  emit_sweep_summary(res, SweepAxis::kJ, dir.string());
  const auto lines = lines_of(dir / "sweep_summary.csv");
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[2].rfind("J,0,", 0), 0u) << lines[2];
  fs::remove_all(dir);
}

TEST(Sweep, ParallelMatchesSerial) {
  const RunConfig base = parse_run_config(kDesk);
  const auto a = sweep(base, SweepAxis::kNFpd, {"8", "12"}, 1);
  const auto b = sweep(base, SweepAxis::kNFpd, {"8", "12"}, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.records[i].objective, b.records[i].objective);
    EXPECT_EQ(a.records[i].stream_seed, b.records[i].stream_seed);
  }
  EXPECT_NE(stream_seed(1, 0), stream_seed(1, 1));
  EXPECT_EQ(stream_seed(7, 3), stream_seed(7, 3));
}

TEST(Sweep, SchemeAxisReportsDesignVariables) {
  RunConfig base = parse_run_config(kDesk);
  base.scheme.m = 60;
  base.scheme.n = 20;
  base.scheme.l = 10;
  base.scheme.k = 4;
  for (const auto& [name, expect] : std::vector<std::pair<std::string, std::size_t>>{
           {"TD", 2 * 61}, {"CPD", 2 * 21}, {"FPD", 2 * 11}, {"FPD-PC", 2 * 4}}) {
    const RunConfig c = sweep_point(base, SweepAxis::kScheme, name);
    EXPECT_EQ(derive(c, build_scenario(c)).design_variables, expect) << name;
  }
}
