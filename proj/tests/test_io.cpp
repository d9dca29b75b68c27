#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <sstream>

#include "tigre/errors.hpp"
#include "tigre/io.hpp"

using namespace tigre;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

int parse_error_line(std::string_view text) {
  try {
    parse_scenario(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -100;
}

}  // namespace

TEST(ScenarioFile, ParsesFullDocument) {
  const char* text = R"(name: demo
snr_db: 5
radar: {n_tx: 4, n_rx: 6, tx_spacing: 0.5, rx_spacing: 0.25}
grid: {min_deg: -60, max_deg: 60, step_deg: 15}
emitters:
  - {amplitude: 1.0, doa_deg: -30, dod_deg: -30}
  - {amplitude: 0.5, phase_deg: 45, doa_deg: -30, dod_deg: 60}
solver:
  method: MP-IAA
  init: matched_filter
  eps_x: 0.001
  max_iters: 40
)";
  const ScenarioFile f = parse_scenario(text);
  EXPECT_EQ(f.scenario.name, "demo");
  EXPECT_EQ(f.scenario.snr_db, 5.0);
  EXPECT_EQ(f.scenario.radar, (RadarConfig{4, 6, 0.5, 0.25}));
  EXPECT_EQ(f.scenario.grid, AngleGrid::uniform(-60, 60, 15));
  ASSERT_EQ(f.scenario.scene.emitters.size(), 2u);
  EXPECT_EQ(f.scenario.scene.emitters[1], make_emitter(0.5, -30, 60, 45));
  EXPECT_EQ(f.solver.method, Method::mp_iaa);
  EXPECT_EQ(f.solver.init, Init::matched_filter);
  EXPECT_EQ(f.solver.eps_x, 0.001);
  EXPECT_EQ(f.solver.max_iters, 40);
  EXPECT_EQ(f.solver.lambda_offdiag, 10.0);
}

TEST(ScenarioFile, DefaultsAndInfiniteSnr) {
  const ScenarioFile f = parse_scenario("snr_db: .inf\nemitters: []\n");
  EXPECT_TRUE(std::isinf(f.scenario.snr_db));
  EXPECT_EQ(f.scenario.grid, AngleGrid::default_grid());
  EXPECT_TRUE(f.scenario.scene.emitters.empty());
  EXPECT_EQ(f.solver, SolverParams{});
  EXPECT_TRUE(std::isinf(parse_scenario("snr_db: inf\n").scenario.snr_db));
}

TEST(ScenarioFile, RoundTripBuiltins) {
  for (const auto& s : builtin_scenarios()) {
    const ScenarioFile f{s, SolverParams{}};
    EXPECT_EQ(parse_scenario(serialize_scenario(f)), f) << s.name;
  }
}

TEST(ScenarioFile, RoundTripRandomScenarios) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    ScenarioFile f;
    f.scenario.name = t % 2 ? "case: \"quoted\" #" + std::to_string(t) : "plain";
    f.scenario.snr_db = t % 7 == 0 ? std::numeric_limits<double>::infinity() : -5.0 + 30.0 * u(rng);
    f.scenario.radar = RadarConfig{1 + t % 5, 2 + t % 3, 0.1 + u(rng), 0.1 + u(rng)};
    if (t % 3 == 0) {
      f.scenario.grid = AngleGrid({-77.7, -10.0 * u(rng), 3.3, 89.9});
    } else {
      f.scenario.grid = AngleGrid::uniform(-80, 80, t % 2 ? 10 : 2.5);
    }
    const auto& g = f.scenario.grid;
    for (int e = 0; e < t % 6; ++e) {
      const double doa = g[static_cast<std::size_t>(e) % g.size()];
      const double dod = g[static_cast<std::size_t>(e * 3 + 1) % g.size()];
      f.scenario.scene.emitters.push_back(make_emitter(u(rng), doa, dod, 360.0 * u(rng) - 180.0));
    }
    f.solver.method = t % 2 ? Method::tigre : Method::mp_iaa;
    f.solver.init = static_cast<Init>(t % 3);
    f.solver.lambda_diag = u(rng);
    f.solver.lambda_offdiag = 100 * u(rng);
    f.solver.eps0 = 1e-9 * (1 + u(rng));
    f.solver.eps_x = t % 5 == 0 ? std::numeric_limits<double>::infinity() : u(rng);
    f.solver.max_iters = 1 + t;
    f.solver.diag_loading = u(rng) * 1e-6;
    f.solver.noise_loading = u(rng);
    const std::string text = serialize_scenario(f);
    EXPECT_EQ(parse_scenario(text), f) << text;
    EXPECT_EQ(config_hash(parse_scenario(text)), config_hash(f));
  }
}

TEST(ScenarioFile, ConfigHashSeparatesConfigs) {
  ScenarioFile a{*find_builtin("one-target"), SolverParams{}};
  ScenarioFile b = a;
  b.solver.lambda_offdiag = 11;
  EXPECT_EQ(config_hash(a), config_hash(a));
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(ScenarioFile, UnknownKeysRejectedWithLine) {
  EXPECT_EQ(parse_error_line("name: x\nsnr: 10\n"), 2);
  EXPECT_EQ(parse_error_line("radar:\n  n_tx: 8\n  n_tz: 8\n"), 3);
  EXPECT_EQ(parse_error_line("emitters:\n  - {amplitude: 1, doa_deg: 0, dod_deg: 0, kind: actual}\n"), 2);
  EXPECT_EQ(parse_error_line("solver:\n  lambda: 3\n"), 2);
}

TEST(ScenarioFile, InvalidValuesRejected) {
  EXPECT_EQ(parse_error_line("snr_db: ten\n"), 1);
  EXPECT_EQ(parse_error_line("radar:\n  n_tx: 2.5\n"), 2);
  EXPECT_GT(parse_error_line("emitters:\n  - {amplitude: -1, doa_deg: 0, dod_deg: 0}\n"), 0);
  EXPECT_GT(parse_error_line("emitters:\n  - {doa_deg: 0, dod_deg: 0}\n"), 0);
  EXPECT_THROW(parse_scenario("emitters:\n  - {amplitude: 1, doa_deg: 5, dod_deg: 0}\n"), ParseError);
  EXPECT_THROW(parse_scenario("grid: {min_deg: -70, max_deg: 70, step_deg: 3}\n"), ParseError);
  EXPECT_THROW(parse_scenario("solver: {method: IAA}\n"), ParseError);
  EXPECT_THROW(parse_scenario("solver: {eps0: 0}\n"), ParseError);
  EXPECT_THROW(parse_scenario("radar: {n_rx: 0}\n"), ParseError);
  EXPECT_THROW(parse_scenario("name: [unterminated\n"), ParseError);
  EXPECT_THROW(parse_scenario(""), ParseError);
  EXPECT_THROW(parse_scenario("- 1\n- 2\n"), ParseError);
}

TEST(MeasurementFile, RoundTripIsExact) {
  const Scenario s = *find_builtin("three-target");
  const ArrayModel model(s.radar, s.grid);
  MeasurementFile m;
  m.measurement = simulate(s, model, 77);
  m.radar = s.radar;
  m.grid = s.grid;
  m.seed = 77;
  m.config_hash = config_hash(ScenarioFile{s, SolverParams{}});
  std::stringstream ss;
  write_measurement(ss, m);
  const std::string text = ss.str();
  EXPECT_EQ(lines(text).size(), 11u + 64u);

  std::istringstream in(text);
  const MeasurementFile back = read_measurement(in);
  EXPECT_EQ(back.measurement.y, m.measurement.y);
  EXPECT_EQ(back.measurement.noise_sigma, m.measurement.noise_sigma);
  EXPECT_EQ(back.measurement.snr_db, 10.0);
  EXPECT_EQ(back.radar, m.radar);
  EXPECT_EQ(back.grid, m.grid);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.config_hash, m.config_hash);
}

TEST(MeasurementFile, NoiseFreeEmptySceneIsZero) {
  Scenario s;
  s.name = "empty";
  s.snr_db = std::numeric_limits<double>::infinity();
  const ArrayModel model(s.radar, s.grid);
  MeasurementFile m;
  m.measurement = simulate(s, model, 1);
  std::stringstream ss;
  write_measurement(ss, m);
  const auto ls = lines(ss.str());
  ASSERT_EQ(ls.size(), 11u + 64u);
  for (std::size_t k = 11; k < ls.size(); ++k) EXPECT_EQ(ls[k], "0,0");
  EXPECT_NE(ss.str().find("# snr_db=inf"), std::string::npos);
}

TEST(MeasurementFile, MalformedInputs) {
  MeasurementFile m;
  m.measurement.y = CVector::Ones(64);
  std::stringstream ss;
  write_measurement(ss, m);
  const std::string good = ss.str();
  auto parse = [](const std::string& t) {
    std::istringstream in(t);
    return read_measurement(in);
  };
  EXPECT_NO_THROW(parse(good));
  EXPECT_THROW(parse("real,imag\n1,0\n"), ParseError);
  EXPECT_THROW(parse(good.substr(0, good.rfind("1,0"))), ParseError);
  EXPECT_THROW(parse(good + "1,x\n"), ParseError);
  std::string extra = good;
  extra.insert(extra.find("real,imag"), "# colour=blue\n");
  EXPECT_THROW(parse(extra), ParseError);
  std::string bad_row = good;
  bad_row.replace(bad_row.rfind("1,0"), 3, "1;0");
  try {
    parse(bad_row);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 11 + 64);
  }
}

TEST(Csv, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  for (double v : {1.0 / 3.0, 6.02214076e23, -2.5e-300}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Csv, GridHasOneCellPerAnglePair) {
  const AngleGrid grid = AngleGrid::default_grid();
  AngleSpectrum x(grid);
  x(2, 5) = Complex(3, 4);
  std::stringstream ss;
  write_grid_csv(ss, x);
  const auto ls = lines(ss.str());
  ASSERT_EQ(ls.size(), grid.size() + 1);
  EXPECT_EQ(split(ls[0]).size(), grid.size() + 1);
  std::size_t cells = 0;
  for (std::size_t r = 1; r < ls.size(); ++r) {
    const auto f = split(ls[r]);
    ASSERT_EQ(f.size(), grid.size() + 1);
    EXPECT_EQ(std::stod(f[0]), grid[r - 1]);
    cells += f.size() - 1;
  }
  EXPECT_EQ(cells, grid.size() * grid.size());
  EXPECT_EQ(split(ls[3])[6], "5");
}

TEST(Csv, StemIndexFollowsColumnStacking) {
  const AngleGrid grid = AngleGrid::default_grid();
  const std::size_t g_count = grid.size();
  AngleSpectrum x(grid);
  x(4, 9) = 0.5;
  x(1, 1) = 0.4;
  std::stringstream ss;
  write_stem_csv(ss, x, 0.4);
  const auto ls = lines(ss.str());
  ASSERT_EQ(ls.size(), g_count * g_count + 1);
  EXPECT_EQ(ls[0], "i,magnitude,doa_deg,dod_deg,above_threshold");
  int flagged = 0;
  for (std::size_t r = 1; r < ls.size(); ++r) {
    const auto f = split(ls[r]);
    const std::size_t i = std::stoul(f[0]);
    const std::size_t g = *grid.index_of(std::stod(f[2])) + 1;
    const std::size_t q = *grid.index_of(std::stod(f[3])) + 1;
    EXPECT_EQ(i, g + (q - 1) * g_count);
    EXPECT_EQ(std::stod(f[1]), std::abs(x(g - 1, q - 1)));
    flagged += std::stoi(f[4]);
  }
  EXPECT_EQ(flagged, 1);
}

TEST(Csv, BenchColumns) {
  AggregateResult a;
  a.method = "TIGRE";
  a.trial_count = 1;
  a.mean_time_s = 0.5;
  std::stringstream plain, timed;
  write_bench_csv(plain, {a, a}, false);
  write_bench_csv(timed, {a}, true);
  const auto p = lines(plain.str());
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0],
            "method,trial_count,mean_error,std_error,mean_iterations,std_iterations,mean_precision,mean_recall,"
            "mean_f1,mean_actual_recall,mean_ghost_recall,converged_count");
  EXPECT_EQ(split(p[1]).size(), split(p[0]).size());
  const auto t = lines(timed.str());
  EXPECT_NE(t[0].find("mean_time_s,std_time_s"), std::string::npos);
  EXPECT_EQ(split(t[1]).size(), split(t[0]).size());
}

TEST(Report, JsonFields) {
  SolverReport r{AngleSpectrum(AngleGrid::default_grid()), 2, true, {IterationRecord{1.0, 2.0, 0.5, 0}, {}}, 0.1};
  r.spectrum(0, 0) = 1.0;
  std::stringstream ss;
  write_report_json(ss, r, SolverParams{}, ReportContext{"TIGRE", "x.yaml", 3, 0.4});
  const std::string s = ss.str();
  for (const char* key : {"\"iterations\": 2", "\"converged\": true", "\"wall_time_s\"", "\"trace\"",
                          "\"detections\": 1", "\"change_norm\": 1.0"}) {
    EXPECT_NE(s.find(key), std::string::npos) << key;
  }
}
