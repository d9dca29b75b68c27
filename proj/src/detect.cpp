#include "tigre/detect.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <utility>

#include "tigre/errors.hpp"

namespace tigre {

namespace {

using Cell = std::pair<std::size_t, std::size_t>;

bool matches(const Cell& det, const Cell& target, bool tolerant) {
  if (!tolerant) return det == target;
  const auto near = [](std::size_t a, std::size_t b) { return (a > b ? a - b : b - a) <= 1; };
  return near(det.first, target.first) && near(det.second, target.second);
}

double ratio_or(std::size_t num, std::size_t den, double empty) {
  return den == 0 ? empty : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<Detection> threshold_detect(const AngleSpectrum& x, double tau) {
  if (!(tau > 0.0)) throw DomainError("detection threshold must be positive");
  std::vector<Detection> out;
  const std::size_t g = x.size();
  for (std::size_t q = 0; q < g; ++q) {
    for (std::size_t d = 0; d < g; ++d) {
      if (std::abs(x(d, q)) > tau) out.push_back(Detection{d, q, x(d, q)});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Detection& a, const Detection& b) { return std::abs(a.amplitude) > std::abs(b.amplitude); });
  return out;
}

double frobenius_sq_error(const CMatrix& estimate, const CMatrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw DomainError("spectra differ in dimensions");
  }
  return (estimate - truth).squaredNorm();
}

double frobenius_sq_error(const AngleSpectrum& estimate, const AngleSpectrum& truth) {
  return frobenius_sq_error(estimate.values(), truth.values());
}

EvalMetrics score_detections(const std::vector<Detection>& detections, const Scene& scene, const AngleGrid& grid,
                             ScoringOptions options) {
  std::set<Cell> targets;
  for (const Emitter& e : scene.emitters) {
    const auto d = grid.index_of(e.doa_deg);
    const auto q = grid.index_of(e.dod_deg);
    if (!d || !q) throw DomainError("scene emitter is not on the angle grid");
    targets.emplace(*d, *q);
  }

  std::set<Cell> detected;
  for (const Detection& det : detections) detected.emplace(det.doa_index, det.dod_index);

  std::size_t true_detections = 0;
  for (const Cell& c : detected) {
    if (std::any_of(targets.begin(), targets.end(),
                    [&](const Cell& t) { return matches(c, t, options.neighbor_tolerance); })) {
      ++true_detections;
    }
  }

  std::size_t found = 0, actual = 0, actual_found = 0, ghost = 0, ghost_found = 0;
  for (const Cell& t : targets) {
    const bool hit = std::any_of(detected.begin(), detected.end(),
                                 [&](const Cell& c) { return matches(c, t, options.neighbor_tolerance); });
    found += hit ? 1 : 0;
    if (t.first == t.second) {
      ++actual;
      actual_found += hit ? 1 : 0;
    } else {
      ++ghost;
      ghost_found += hit ? 1 : 0;
    }
  }

  EvalMetrics m;
  m.precision = ratio_or(true_detections, detected.size(), targets.empty() ? 1.0 : 0.0);
  m.recall = ratio_or(found, targets.size(), 1.0);
  m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.actual_recall = ratio_or(actual_found, actual, 1.0);
  m.ghost_recall = ratio_or(ghost_found, ghost, 1.0);
  return m;
}

}  // namespace tigre
