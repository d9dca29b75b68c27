#include <cmath>
#include <ostream>

#include <json.hpp>

#include "tigre/io.hpp"

namespace tigre {

namespace {

// JSON has no inf/nan, so those become strings.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

void write_grid_csv(std::ostream& out, const AngleSpectrum& spectrum) {
  const AngleGrid& grid = spectrum.grid();
  out << "doa_deg\\dod_deg";
  for (double a : grid.degrees()) out << "," << format_double(a);
  out << "\n";
  for (std::size_t d = 0; d < grid.size(); ++d) {
    out << format_double(grid[d]);
    for (std::size_t q = 0; q < grid.size(); ++q) out << "," << format_double(std::abs(spectrum(d, q)));
    out << "\n";
  }
}

void write_stem_csv(std::ostream& out, const AngleSpectrum& spectrum, double threshold) {
  const AngleGrid& grid = spectrum.grid();
  const std::size_t g_count = grid.size();
  out << "i,magnitude,doa_deg,dod_deg,above_threshold\n";
  for (std::size_t q = 0; q < g_count; ++q) {
    for (std::size_t d = 0; d < g_count; ++d) {
      const double mag = std::abs(spectrum(d, q));
      out << (d + 1) + q * g_count << "," << format_double(mag) << "," << format_double(grid[d]) << ","
          << format_double(grid[q]) << "," << (mag > threshold ? 1 : 0) << "\n";
    }
  }
}

void write_report_json(std::ostream& out, const SolverReport& report, const SolverParams& params,
                       const ReportContext& context) {
  nlohmann::ordered_json j;
  j["method"] = context.method;
  j["source"] = context.source;
  j["seed"] = context.seed;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["wall_time_s"] = report.wall_time_seconds;
  j["threshold"] = context.threshold;
  j["detections"] = [&] {
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < report.spectrum.values().size(); ++i) {
      n += std::abs(report.spectrum.values().data()[i]) > context.threshold ? 1 : 0;
    }
    return n;
  }();
  j["params"] = {
      {"method", to_string(params.method)},   {"init", to_string(params.init)},
      {"lambda_diag", number(params.lambda_diag)}, {"lambda_offdiag", number(params.lambda_offdiag)},
      {"eps0", number(params.eps0)},          {"eps_x", number(params.eps_x)},
      {"max_iters", params.max_iters},        {"diag_loading", number(params.diag_loading)},
      {"noise_loading", number(params.noise_loading)},
  };
  auto trace = nlohmann::ordered_json::array();
  for (std::size_t n = 0; n < report.trace.size(); ++n) {
    const auto& r = report.trace[n];
    trace.push_back({{"iteration", n + 1},
                     {"change_norm", number(r.change_norm)},
                     {"loss", number(r.loss)},
                     {"diag_reg_value", number(r.diag_reg_value)},
                     {"fallback_cells", r.fallback_cells}});
  }
  j["trace"] = std::move(trace);
  out << j.dump(2) << "\n";
}

void write_bench_csv(std::ostream& out, const std::vector<AggregateResult>& results, bool include_timing) {
  out << "method,trial_count,mean_error,std_error,mean_iterations,std_iterations";
  if (include_timing) out << ",mean_time_s,std_time_s";
  out << ",mean_precision,mean_recall,mean_f1,mean_actual_recall,mean_ghost_recall,converged_count\n";
  for (const auto& r : results) {
    out << r.method << "," << r.trial_count << "," << format_double(r.mean_error) << ","
        << format_double(r.std_error) << "," << format_double(r.mean_iterations) << ","
        << format_double(r.std_iterations);
    if (include_timing) out << "," << format_double(r.mean_time_s) << "," << format_double(r.std_time_s);
    out << "," << format_double(r.mean_precision) << "," << format_double(r.mean_recall) << ","
        << format_double(r.mean_f1) << "," << format_double(r.mean_actual_recall) << ","
        << format_double(r.mean_ghost_recall) << "," << r.converged_count << "\n";
  }
}

}  // namespace tigre
