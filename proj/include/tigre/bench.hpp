#pragma once

// Seeded Monte Carlo harness: repeated noisy trials of a scenario, every
// method estimating from the same measurement in each trial.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tigre/detect.hpp"
#include "tigre/model.hpp"
#include "tigre/solver.hpp"

namespace tigre {

struct Scenario {
  std::string name;
  Scene scene;
  double snr_db = 10.0;
  AngleGrid grid = AngleGrid::default_grid();
  RadarConfig radar;

  // Throws DomainError when the radar is invalid or an emitter is off-grid.
  void validate() const;
  bool operator==(const Scenario&) const = default;
};

struct MethodConfig {
  std::string name;
  SolverParams params;
};

// "MP-IAA" (matched-filter start), "TIGRE" (diagonal least-squares start) and
// "TIGRE-random-init".
MethodConfig method_preset(const std::string& name);
std::vector<MethodConfig> default_methods();

struct TrialResult {
  std::uint64_t seed = 0;
  std::string method;
  double error = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  EvalMetrics metrics;
  AngleSpectrum spectrum{AngleGrid::default_grid()};
};

struct AggregateResult {
  std::string method;
  std::size_t trial_count = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  double mean_iterations = 0.0;
  double std_iterations = 0.0;
  double mean_time_s = 0.0;
  double std_time_s = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  double mean_actual_recall = 0.0;
  double mean_ghost_recall = 0.0;
  std::size_t converged_count = 0;
  std::vector<TrialResult> trials;
};

// Means and sample standard deviations (zero for a single trial).
AggregateResult aggregate(const std::string& method, std::vector<TrialResult> trials);

struct BenchOptions {
  double threshold = kDefaultDetectionThreshold;
  ScoringOptions scoring;
  // Worker threads for trials; results do not depend on this.
  unsigned workers = 1;
  // Called with (trial seed, method name, measurement) before each estimate.
  // Must be thread-safe when workers > 1.
  std::function<void(std::uint64_t, const std::string&, const Measurement&)> observer;
};

// Trial t draws its noise (and any random initialization) from seed base_seed + t.
std::vector<AggregateResult> run_trials(const Scenario& scenario, const std::vector<MethodConfig>& methods,
                                        int n_trials, std::uint64_t base_seed, const BenchOptions& options = {});

// Noisy measurement of the scenario for one seed.
Measurement simulate(const Scenario& scenario, const ArrayModel& model, std::uint64_t seed);

// one-target, two-target and three-target, built from the three
// target/ghost triples (actual 1.0, ghosts 0.7 and 0.5) at 10 dB.
std::vector<Scenario> builtin_scenarios();
std::optional<Scenario> find_builtin(const std::string& name);

}  // namespace tigre
