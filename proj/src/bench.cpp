#include "tigre/bench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "tigre/errors.hpp"

namespace tigre {

namespace {

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

template <typename Fn>
Stats summarize(const std::vector<TrialResult>& trials, Fn field) {
  Stats s;
  if (trials.empty()) return s;
  double sum = 0.0;
  for (const auto& t : trials) sum += field(t);
  s.mean = sum / static_cast<double>(trials.size());
  if (trials.size() > 1) {
    double sq = 0.0;
    for (const auto& t : trials) sq += (field(t) - s.mean) * (field(t) - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(trials.size() - 1));
  }
  return s;
}

// Each row yields an actual target at (a, a) and ghosts at (a, o) and (o, a).
struct TargetRow {
  double actual;
  double other;
};
constexpr TargetRow kTargets[] = {{-20.0, 40.0}, {-60.0, 60.0}, {-40.0, 50.0}};

Scene targets_scene(std::size_t count) {
  Scene scene;
  for (std::size_t k = 0; k < count; ++k) {
    const auto& t = kTargets[k];
    scene.emitters.push_back(make_emitter(1.0, t.actual, t.actual));
    scene.emitters.push_back(make_emitter(0.7, t.actual, t.other));
    scene.emitters.push_back(make_emitter(0.5, t.other, t.actual));
  }
  return scene;
}

}  // namespace

void Scenario::validate() const {
  radar.validate();
  for (std::size_t e = 0; e < scene.emitters.size(); ++e) {
    const auto& em = scene.emitters[e];
    if (!grid.index_of(em.doa_deg) || !grid.index_of(em.dod_deg)) {
      throw DomainError("scenario '" + name + "': emitter " + std::to_string(e) + " is not on the angle grid");
    }
  }
  if (std::isnan(snr_db)) throw DomainError("scenario '" + name + "': SNR is NaN");
}

MethodConfig method_preset(const std::string& name) {
  MethodConfig m{name, {}};
  if (name == "MP-IAA") {
    m.params.method = Method::mp_iaa;
    m.params.init = Init::matched_filter;
  } else if (name == "TIGRE") {
    m.params.method = Method::tigre;
    m.params.init = Init::diagonal_ls;
  } else if (name == "TIGRE-random-init") {
    m.params.method = Method::tigre;
    m.params.init = Init::random;
  } else {
    throw DomainError("unknown method preset '" + name + "' (expected MP-IAA, TIGRE or TIGRE-random-init)");
  }
  return m;
}

std::vector<MethodConfig> default_methods() {
  return {method_preset("MP-IAA"), method_preset("TIGRE-random-init"), method_preset("TIGRE")};
}

AggregateResult aggregate(const std::string& method, std::vector<TrialResult> trials) {
  AggregateResult a;
  a.method = method;
  a.trial_count = trials.size();
  const auto err = summarize(trials, [](const TrialResult& t) { return t.error; });
  const auto its = summarize(trials, [](const TrialResult& t) { return static_cast<double>(t.iterations); });
  const auto time = summarize(trials, [](const TrialResult& t) { return t.wall_time_s; });
  a.mean_error = err.mean;
  a.std_error = err.stddev;
  a.mean_iterations = its.mean;
  a.std_iterations = its.stddev;
  a.mean_time_s = time.mean;
  a.std_time_s = time.stddev;
  a.mean_precision = summarize(trials, [](const TrialResult& t) { return t.metrics.precision; }).mean;
  a.mean_recall = summarize(trials, [](const TrialResult& t) { return t.metrics.recall; }).mean;
  a.mean_f1 = summarize(trials, [](const TrialResult& t) { return t.metrics.f1; }).mean;
  a.mean_actual_recall = summarize(trials, [](const TrialResult& t) { return t.metrics.actual_recall; }).mean;
  a.mean_ghost_recall = summarize(trials, [](const TrialResult& t) { return t.metrics.ghost_recall; }).mean;
  for (const auto& t : trials) a.converged_count += t.converged ? 1 : 0;
  a.trials = std::move(trials);
  return a;
}

Measurement simulate(const Scenario& scenario, const ArrayModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const AngleSpectrum truth = spectrum_from_scene(scenario.scene, scenario.grid);
  return add_noise(forward(truth, model), scenario.snr_db, rng);
}

std::vector<AggregateResult> run_trials(const Scenario& scenario, const std::vector<MethodConfig>& methods,
                                        int n_trials, std::uint64_t base_seed, const BenchOptions& options) {
  if (n_trials < 1) throw DomainError("n_trials must be at least 1");
  scenario.validate();
  for (const auto& m : methods) m.params.validate();

  const ArrayModel model(scenario.radar, scenario.grid);
  const AngleSpectrum truth = spectrum_from_scene(scenario.scene, scenario.grid);
  const auto trials = static_cast<std::size_t>(n_trials);

  // results[method][trial]
  std::vector<std::vector<TrialResult>> results(methods.size(), std::vector<TrialResult>(trials));
  std::vector<std::exception_ptr> failures(trials);

  auto run_one = [&](std::size_t t) {
    const std::uint64_t seed = base_seed + t;
    try {
      const Measurement y = simulate(scenario, model, seed);
      for (std::size_t m = 0; m < methods.size(); ++m) {
        if (options.observer) options.observer(seed, methods[m].name, y);
        SolverReport rep = run(y, model, methods[m].params, seed);
        TrialResult r;
        r.seed = seed;
        r.method = methods[m].name;
        r.error = frobenius_sq_error(rep.spectrum, truth);
        r.iterations = rep.iterations;
        r.wall_time_s = rep.wall_time_seconds;
        r.converged = rep.converged;
        r.metrics = score_detections(threshold_detect(rep.spectrum, options.threshold), scenario.scene,
                                     scenario.grid, options.scoring);
        r.metrics.frobenius_sq_error = r.error;
        r.spectrum = std::move(rep.spectrum);
        results[m][t] = std::move(r);
      }
    } catch (const std::exception& e) {
      failures[t] = std::make_exception_ptr(
          SolverError("trial with seed " + std::to_string(seed) + " failed: " + e.what()));
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(trials)));
  if (workers == 1) {
    for (std::size_t t = 0; t < trials; ++t) run_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < trials; t = next++) run_one(t);
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::vector<AggregateResult> out;
  out.reserve(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) out.push_back(aggregate(methods[m].name, std::move(results[m])));
  return out;
}

std::vector<Scenario> builtin_scenarios() {
  const char* names[] = {"one-target", "two-target", "three-target"};
  std::vector<Scenario> out;
  for (std::size_t k = 0; k < 3; ++k) {
    Scenario s;
    s.name = names[k];
    s.scene = targets_scene(k + 1);
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<Scenario> find_builtin(const std::string& name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

}  // namespace tigre
