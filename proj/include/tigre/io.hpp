#pragma once

// File formats used by the command-line tool: YAML scenario files, the
// measurement CSV, and the plot-ready CSV/JSON outputs.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tigre/bench.hpp"
#include "tigre/model.hpp"
#include "tigre/solver.hpp"

namespace tigre {

// A scenario plus the solver settings it asks for. Solver keys missing from
// the file keep their SolverParams defaults.
struct ScenarioFile {
  Scenario scenario;
  SolverParams solver;
  bool operator==(const ScenarioFile&) const = default;
};

// Throws ParseError (with a 1-based line when known) on malformed YAML,
// unknown keys, wrong types or values that fail validation.
ScenarioFile parse_scenario(std::string_view text);
ScenarioFile load_scenario_file(const std::filesystem::path& path);

// Inverse of parse_scenario. Numbers use the shortest representation that
// reads back to the same double, so a round trip is exact.
std::string serialize_scenario(const ScenarioFile& file);

// 64-bit FNV-1a of serialize_scenario(file).
std::uint64_t config_hash(const ScenarioFile& file);

struct MeasurementFile {
  Measurement measurement;
  RadarConfig radar;
  AngleGrid grid = AngleGrid::default_grid();
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

// "# key=value" header lines, a "real,imag" column header and one row per
// channel.
void write_measurement(std::ostream& out, const MeasurementFile& file);
MeasurementFile read_measurement(std::istream& in);
MeasurementFile load_measurement_file(const std::filesystem::path& path);

// %.17g, with inf/nan spelled "inf", "-inf", "nan".
std::string format_double(double value);

// Header "doa_deg\dod_deg,<dod angles...>", then one row per DOA angle with
// |X| in each DOD column.
void write_grid_csv(std::ostream& out, const AngleSpectrum& spectrum);

// Columns i,magnitude,doa_deg,dod_deg,above_threshold with the 1-based vector
// index i = g + (q - 1) G over 1-based DOA index g and DOD index q.
void write_stem_csv(std::ostream& out, const AngleSpectrum& spectrum, double threshold);

struct ReportContext {
  std::string method;
  std::string source;
  std::uint64_t seed = 0;
  double threshold = kDefaultDetectionThreshold;
};

// Iterations, convergence, wall time, settings and the per-iteration trace.
void write_report_json(std::ostream& out, const SolverReport& report, const SolverParams& params,
                       const ReportContext& context);

// One row per method. Timing columns are included only when asked for since
// they differ from run to run.
void write_bench_csv(std::ostream& out, const std::vector<AggregateResult>& results, bool include_timing);

}  // namespace tigre
