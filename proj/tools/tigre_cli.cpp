// tigre: simulate MIMO radar measurements, estimate DOA/DOD spectra and
// benchmark estimators from the command line.
//
// Exit status: 0 success, 1 I/O failure, 2 parse or validation error,
// 3 solver failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tigre/bench.hpp"
#include "tigre/detect.hpp"
#include "tigre/errors.hpp"
#include "tigre/io.hpp"
#include "tigre/model.hpp"
#include "tigre/solver.hpp"

namespace fs = std::filesystem;
using namespace tigre;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SceneOptions {
  std::string input;
  std::uint64_t seed = 0;
  bool no_noise = false;
  std::optional<double> grid_step;
};

bool is_measurement_file(const std::string& path) {
  std::ifstream in(path);
  std::string first;
  return in && std::getline(in, first) && first.rfind("# tigre measurement", 0) == 0;
}

// A scenario file path, or the name of a builtin scenario.
ScenarioFile resolve_scenario(const SceneOptions& opt) {
  ScenarioFile f;
  if (fs::exists(opt.input)) {
    f = load_scenario_file(opt.input);
  } else if (auto b = find_builtin(opt.input)) {
    f.scenario = *b;
  } else {
    throw ParseError("'" + opt.input + "' is neither a file nor a builtin scenario (see 'tigre scenarios')");
  }
  if (opt.no_noise) f.scenario.snr_db = std::numeric_limits<double>::infinity();
  if (opt.grid_step) {
    const AngleGrid& g = f.scenario.grid;
    try {
      f.scenario.grid = AngleGrid::uniform(g[0], g[g.size() - 1], *opt.grid_step);
      f.scenario.validate();
    } catch (const DomainError& e) {
      throw ParseError(std::string("--grid-step: ") + e.what());
    }
  }
  return f;
}

SolverParams with_method(SolverParams base, const std::string& preset) {
  const MethodConfig m = method_preset(preset);
  base.method = m.params.method;
  base.init = m.params.init;
  return base;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  auto out = open_out(out_path);
  out << text;
  if (!out) throw IoError("failed writing '" + out_path + "'");
}

void add_scene_options(CLI::App* cmd, SceneOptions& opt) {
  cmd->add_option("input", opt.input, "Scenario YAML file or builtin scenario name")->required();
  cmd->add_option("--seed", opt.seed, "Noise seed (base seed for bench)");
  cmd->add_flag("--no-noise", opt.no_noise, "Noise-free measurement");
  cmd->add_option("--grid-step", opt.grid_step, "Regrid the scenario's angle range at this step (degrees)")
      ->check(CLI::PositiveNumber);
}

int cmd_scenarios() {
  std::cout << "name,emitters,snr_db,grid_points\n";
  for (const auto& s : builtin_scenarios()) {
    std::cout << s.name << "," << s.scene.emitters.size() << "," << format_double(s.snr_db) << ","
              << s.grid.size() << "\n";
  }
  return 0;
}

int cmd_simulate(const SceneOptions& opt, const std::string& out_path) {
  const ScenarioFile f = resolve_scenario(opt);
  const ArrayModel model(f.scenario.radar, f.scenario.grid);
  MeasurementFile m;
  m.measurement = simulate(f.scenario, model, opt.seed);
  m.radar = f.scenario.radar;
  m.grid = f.scenario.grid;
  m.seed = opt.seed;
  m.config_hash = config_hash(f);
  std::ostringstream ss;
  write_measurement(ss, m);
  emit(out_path, ss.str());
  return 0;
}

int cmd_estimate(const SceneOptions& opt, const std::optional<std::string>& method, double threshold,
                 const std::string& out_dir) {
  std::optional<ArrayModel> model;
  Measurement y;
  SolverParams params;
  if (is_measurement_file(opt.input)) {
    if (opt.no_noise || opt.grid_step) throw ParseError("--no-noise and --grid-step apply to scenarios only");
    MeasurementFile m = load_measurement_file(opt.input);
    model.emplace(m.radar, m.grid);
    y = std::move(m.measurement);
  } else {
    const ScenarioFile f = resolve_scenario(opt);
    model.emplace(f.scenario.radar, f.scenario.grid);
    y = simulate(f.scenario, *model, opt.seed);
    params = f.solver;
  }
  const std::string method_name = method.value_or(
      params.method == Method::mp_iaa ? "MP-IAA" : (params.init == Init::random ? "TIGRE-random-init" : "TIGRE"));
  if (method) params = with_method(params, *method);

  const SolverReport report = run(y, *model, params, opt.seed);

  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "grid.csv");
    write_grid_csv(out, report.spectrum);
  }
  {
    auto out = open_out(dir / "stem.csv");
    write_stem_csv(out, report.spectrum, threshold);
  }
  {
    auto out = open_out(dir / "report.json");
    write_report_json(out, report, params, ReportContext{method_name, opt.input, opt.seed, threshold});
  }
  std::cout << method_name << ": " << report.iterations << " iterations, "
            << (report.converged ? "converged" : "not converged") << ", "
            << threshold_detect(report.spectrum, threshold).size() << " cells above " << threshold
            << "\n";
  return 0;
}

int cmd_bench(const SceneOptions& opt, std::vector<std::string> methods, int trials, double threshold,
              unsigned workers, bool timing, const std::string& out_path) {
  const ScenarioFile f = resolve_scenario(opt);
  if (methods.empty()) methods = {"MP-IAA", "TIGRE-random-init", "TIGRE"};
  std::vector<MethodConfig> configs;
  for (const auto& m : methods) configs.push_back(MethodConfig{m, with_method(f.solver, m)});

  BenchOptions options;
  options.threshold = threshold;
  options.workers = workers;
  const auto results = run_trials(f.scenario, configs, trials, opt.seed, options);
  std::ostringstream ss;
  write_bench_csv(ss, results, timing);
  emit(out_path, ss.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ghost-aware DOA/DOD estimation for co-located MIMO radar"};
  app.require_subcommand(1);

  app.add_subcommand("scenarios", "List builtin scenarios");

  SceneOptions sim_opt;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "Write a simulated measurement file");
  add_scene_options(sim, sim_opt);
  sim->add_option("--out", sim_out, "Output file (default stdout)");

  SceneOptions est_opt;
  std::optional<std::string> est_method;
  double est_threshold = kDefaultDetectionThreshold;
  std::string est_out;
  auto* est = app.add_subcommand("estimate", "Estimate the angle spectrum of a scenario or measurement file");
  add_scene_options(est, est_opt);
  est->add_option("--method", est_method, "MP-IAA, TIGRE or TIGRE-random-init (default: scenario setting)")
      ->check(CLI::IsMember({"MP-IAA", "TIGRE", "TIGRE-random-init"}));
  est->add_option("--threshold", est_threshold, "Detection threshold on |X|")->check(CLI::PositiveNumber);
  est->add_option("--out", est_out, "Output directory for grid.csv, stem.csv, report.json");

  SceneOptions bench_opt;
  std::vector<std::string> bench_methods;
  int bench_trials = 100;
  double bench_threshold = kDefaultDetectionThreshold;
  unsigned bench_workers = 1;
  bool bench_timing = false;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Monte Carlo comparison of estimators");
  add_scene_options(bench, bench_opt);
  bench->add_option("--method", bench_methods, "Method to include (repeatable; default all three)")
      ->check(CLI::IsMember({"MP-IAA", "TIGRE", "TIGRE-random-init"}));
  bench->add_option("--trials", bench_trials, "Number of trials")->check(CLI::PositiveNumber);
  bench->add_option("--threshold", bench_threshold, "Detection threshold on |X|")->check(CLI::PositiveNumber);
  bench->add_option("--workers", bench_workers, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_flag("--timing", bench_timing, "Add wall-time columns (not reproducible)");
  bench->add_option("--out", bench_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (app.got_subcommand("scenarios")) return cmd_scenarios();
    if (app.got_subcommand(sim)) return cmd_simulate(sim_opt, sim_out);
    if (app.got_subcommand(est)) return cmd_estimate(est_opt, est_method, est_threshold, est_out);
    if (app.got_subcommand(bench)) {
      return cmd_bench(bench_opt, bench_methods, bench_trials, bench_threshold, bench_workers, bench_timing,
                       bench_out);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
