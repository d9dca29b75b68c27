#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "tigre/errors.hpp"
#include "tigre/io.hpp"

namespace tigre {

namespace {

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? -1 : node.Mark().line + 1; }

void require_map(const YAML::Node& node, const std::string& what) {
  if (!node.IsMap()) throw ParseError(what + " must be a mapping", line_of(node));
}

void reject_unknown(const YAML::Node& map, const std::string& where, std::initializer_list<std::string_view> allowed) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError("unknown key '" + key + "' in " + where, line_of(kv.first));
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ParseError("'" + key + "' must be a scalar", line_of(node));
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    throw ParseError("'" + key + "' has an invalid value '" + node.Scalar() + "'", line_of(node));
  }
}

template <typename T>
void read_opt(const YAML::Node& map, const char* key, T& dst) {
  if (const auto n = map[key]) dst = scalar<T>(n, key);
}

double read_double(const YAML::Node& map, const char* key, const std::string& where) {
  const auto n = map[key];
  if (!n) throw ParseError("missing '" + std::string(key) + "' in " + where, line_of(map));
  return scalar<double>(n, key);
}

// yaml-cpp accepts .inf/.nan; "inf" is allowed as well for convenience.
double read_snr(const YAML::Node& node) {
  if (node.IsScalar()) {
    const auto& s = node.Scalar();
    if (s == "inf" || s == "+inf" || s == "Inf") return std::numeric_limits<double>::infinity();
  }
  return scalar<double>(node, "snr_db");
}

AngleGrid read_grid(const YAML::Node& node) {
  require_map(node, "grid");
  reject_unknown(node, "grid", {"min_deg", "max_deg", "step_deg", "angles_deg"});
  try {
    if (const auto list = node["angles_deg"]) {
      if (node["min_deg"] || node["max_deg"] || node["step_deg"]) {
        throw ParseError("grid takes either angles_deg or min_deg/max_deg/step_deg", line_of(node));
      }
      if (!list.IsSequence()) throw ParseError("'angles_deg' must be a list", line_of(list));
      std::vector<double> angles;
      for (const auto& a : list) angles.push_back(scalar<double>(a, "angles_deg"));
      return AngleGrid(std::move(angles));
    }
    return AngleGrid::uniform(read_double(node, "min_deg", "grid"), read_double(node, "max_deg", "grid"),
                              read_double(node, "step_deg", "grid"));
  } catch (const DomainError& e) {
    throw ParseError(std::string("grid: ") + e.what(), line_of(node));
  }
}

RadarConfig read_radar(const YAML::Node& node) {
  require_map(node, "radar");
  reject_unknown(node, "radar", {"n_tx", "n_rx", "tx_spacing", "rx_spacing"});
  RadarConfig r;
  read_opt(node, "n_tx", r.n_tx);
  read_opt(node, "n_rx", r.n_rx);
  read_opt(node, "tx_spacing", r.tx_spacing);
  read_opt(node, "rx_spacing", r.rx_spacing);
  return r;
}

Emitter read_emitter(const YAML::Node& node) {
  require_map(node, "emitter");
  reject_unknown(node, "emitter", {"amplitude", "phase_deg", "doa_deg", "dod_deg"});
  Emitter e;
  e.magnitude = read_double(node, "amplitude", "emitter");
  read_opt(node, "phase_deg", e.phase_deg);
  e.doa_deg = read_double(node, "doa_deg", "emitter");
  e.dod_deg = read_double(node, "dod_deg", "emitter");
  if (!(e.magnitude >= 0.0) || !std::isfinite(e.magnitude)) {
    throw ParseError("emitter amplitude must be a nonnegative magnitude", line_of(node["amplitude"]));
  }
  if (!std::isfinite(e.phase_deg)) throw ParseError("emitter phase must be finite", line_of(node["phase_deg"]));
  return e;
}

SolverParams read_solver(const YAML::Node& node) {
  require_map(node, "solver");
  reject_unknown(node, "solver",
                 {"method", "init", "lambda_diag", "lambda_offdiag", "eps0", "eps_x", "max_iters", "diag_loading",
                  "noise_loading"});
  SolverParams p;
  try {
    if (const auto n = node["method"]) p.method = parse_method(scalar<std::string>(n, "method"));
    if (const auto n = node["init"]) p.init = parse_init(scalar<std::string>(n, "init"));
  } catch (const DomainError& e) {
    throw ParseError(std::string("solver: ") + e.what(), line_of(node));
  }
  read_opt(node, "lambda_diag", p.lambda_diag);
  read_opt(node, "lambda_offdiag", p.lambda_offdiag);
  read_opt(node, "eps0", p.eps0);
  read_opt(node, "eps_x", p.eps_x);
  read_opt(node, "max_iters", p.max_iters);
  read_opt(node, "diag_loading", p.diag_loading);
  read_opt(node, "noise_loading", p.noise_loading);
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("solver: ") + e.what(), line_of(node));
  }
  return p;
}

std::string num(double v) {
  if (std::isnan(v)) return ".nan";
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  return fmt::format("{}", v);
}

bool is_uniform(const AngleGrid& g, double& step) {
  if (g.size() < 2) return false;
  step = g[1] - g[0];
  try {
    return AngleGrid::uniform(g[0], g[g.size() - 1], step) == g;
  } catch (const DomainError&) {
    return false;
  }
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.is_null() ? -1 : e.mark.line + 1);
  }
  if (!root.IsDefined() || root.IsNull()) throw ParseError("scenario file is empty");
  require_map(root, "scenario");
  reject_unknown(root, "scenario", {"name", "snr_db", "radar", "grid", "emitters", "solver"});

  ScenarioFile f;
  f.scenario.name = "unnamed";
  read_opt(root, "name", f.scenario.name);
  if (const auto n = root["snr_db"]) f.scenario.snr_db = read_snr(n);
  if (const auto n = root["radar"]) f.scenario.radar = read_radar(n);
  if (const auto n = root["grid"]) f.scenario.grid = read_grid(n);
  if (const auto n = root["emitters"]) {
    if (n.IsNull()) {
      // "emitters:" with nothing after it is an empty scene.
    } else if (!n.IsSequence()) {
      throw ParseError("'emitters' must be a list", line_of(n));
    } else {
      for (const auto& e : n) f.scenario.scene.emitters.push_back(read_emitter(e));
    }
  }
  if (const auto n = root["solver"]) f.solver = read_solver(n);

  try {
    f.scenario.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return f;
}

ScenarioFile load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string serialize_scenario(const ScenarioFile& file) {
  const Scenario& s = file.scenario;
  const SolverParams& p = file.solver;
  std::string out;
  auto line = [&out](const std::string& l) { out += l + "\n"; };

  YAML::Emitter quoted;
  quoted << YAML::DoubleQuoted << s.name;
  line("name: " + std::string(quoted.c_str()));
  line("snr_db: " + num(s.snr_db));
  line("radar:");
  line(fmt::format("  n_tx: {}", s.radar.n_tx));
  line(fmt::format("  n_rx: {}", s.radar.n_rx));
  line("  tx_spacing: " + num(s.radar.tx_spacing));
  line("  rx_spacing: " + num(s.radar.rx_spacing));
  line("grid:");
  double step = 0.0;
  if (is_uniform(s.grid, step)) {
    line("  min_deg: " + num(s.grid[0]));
    line("  max_deg: " + num(s.grid[s.grid.size() - 1]));
    line("  step_deg: " + num(step));
  } else {
    std::string list;
    for (double a : s.grid.degrees()) list += (list.empty() ? "" : ", ") + num(a);
    line("  angles_deg: [" + list + "]");
  }
  if (s.scene.emitters.empty()) {
    line("emitters: []");
  } else {
    line("emitters:");
    for (const auto& e : s.scene.emitters) {
      line("  - {amplitude: " + num(e.magnitude) + ", phase_deg: " + num(e.phase_deg) + ", doa_deg: " + num(e.doa_deg) +
           ", dod_deg: " + num(e.dod_deg) + "}");
    }
  }
  line("solver:");
  line("  method: " + to_string(p.method));
  line("  init: " + to_string(p.init));
  line("  lambda_diag: " + num(p.lambda_diag));
  line("  lambda_offdiag: " + num(p.lambda_offdiag));
  line("  eps0: " + num(p.eps0));
  line("  eps_x: " + num(p.eps_x));
  line(fmt::format("  max_iters: {}", p.max_iters));
  line("  diag_loading: " + num(p.diag_loading));
  line("  noise_loading: " + num(p.noise_loading));
  return out;
}

std::uint64_t config_hash(const ScenarioFile& file) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_scenario(file)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace tigre
