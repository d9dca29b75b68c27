#pragma once

#include <cstddef>
#include <vector>

#include "tigre/model.hpp"

namespace tigre {

inline constexpr double kDefaultDetectionThreshold = 0.4;

struct Detection {
  std::size_t doa_index = 0;
  std::size_t dod_index = 0;
  Complex amplitude;

  EmitterKind kind() const { return doa_index == dod_index ? EmitterKind::actual : EmitterKind::ghost; }
};

struct EvalMetrics {
  double frobenius_sq_error = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double actual_recall = 0.0;
  double ghost_recall = 0.0;
};

// Cells with |X| > tau (strict), largest magnitude first.
std::vector<Detection> threshold_detect(const AngleSpectrum& x, double tau = kDefaultDetectionThreshold);

double frobenius_sq_error(const AngleSpectrum& estimate, const AngleSpectrum& truth);
double frobenius_sq_error(const CMatrix& estimate, const CMatrix& truth);

struct ScoringOptions {
  // Accept a detection within +-1 cell of an emitter in both DOA and DOD.
  bool neighbor_tolerance = false;
};

// Precision/recall of detections against the scene's emitter cells. Emitters
// sharing a cell count once. frobenius_sq_error is left at zero; callers fill
// it from the spectrum.
//
// Conventions for empty sets: precision is 0 when nothing was detected but the
// scene has emitters, recall is 1 for a kind with no emitters, and an empty
// scene with no detections scores 1 throughout.
EvalMetrics score_detections(const std::vector<Detection>& detections, const Scene& scene, const AngleGrid& grid,
                             ScoringOptions options = {});

}  // namespace tigre
