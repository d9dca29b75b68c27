#pragma once

// Grid-based DOA/DOD spectrum estimators: the MP-IAA baseline and its
// target-induced regularized variant (TIGRE).
//
// Both share the same covariance engine. For the current iterate x^n the
// engine forms R = A diag(|x^n|^2) A^H + delta I once, inverts it, and derives
// the leave-one-out statistics of every cell,
//
//   Q_i       = R - |x_i|^2 a_i a_i^H
//   beta_i    = a_i^H Q_i^{-1} y
//   gamma_i   = a_i^H Q_i^{-1} a_i
//
// through the Sherman-Morrison downdate of R^{-1}. MP-IAA then sets
// x_i <- beta_i / gamma_i, TIGRE sets
//
//   x_i <- D beta_i / (D gamma_i + lambda_i),   D = |X_gg|^2 + |X_qq|^2 + eps0
//
// where X_gg and X_qq are the DOA == DOD cells sharing a row or column with
// cell i. All cells are updated simultaneously from x^n.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tigre/model.hpp"

namespace tigre {

enum class Method { tigre, mp_iaa };
enum class Init { diagonal_ls, matched_filter, random };

std::string to_string(Method method);
std::string to_string(Init init);
Method parse_method(const std::string& text);
Init parse_init(const std::string& text);

struct SolverParams {
  double lambda_diag = 1.0;
  double lambda_offdiag = 10.0;
  double eps0 = 1e-6;
  double eps_x = 1e-2;
  int max_iters = 100;
  // delta = diag_loading * mean(diag R) + noise_loading * sigma^2
  double diag_loading = 1e-8;
  double noise_loading = 1.0;
  Method method = Method::tigre;
  Init init = Init::diagonal_ls;

  void validate() const;
  // Regularization weight of cell (doa, dod); zero for MP-IAA.
  double lambda(std::size_t doa, std::size_t dod) const;
  bool operator==(const SolverParams&) const = default;
};

struct IterationRecord {
  double change_norm = 0.0;     // ||x^{n+1} - x^n||_2
  double loss = 0.0;            // regularized loss at x^{n+1} with weights from x^n
  double diag_reg_value = 0.0;  // sum_g |z^{n+1}_g|^2 / (2|z^n_g|^2 + eps0)
  int fallback_cells = 0;       // cells whose downdate fell back to direct inversion
};

struct SolverReport {
  AngleSpectrum spectrum;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> trace;
  double wall_time_seconds = 0.0;
};

struct CovarianceState {
  CMatrix r;      // A diag(|x|^2) A^H + delta I
  CMatrix r_inv;
  double loading = 0.0;
};

struct CellStatistics {
  Complex beta;
  double gamma = 0.0;
  double y_weighted_norm = 0.0;  // y^H Q_i^{-1} y
  bool fallback = false;
};

// X^0 = diag(z*), z* = argmin ||y - C z||, C holding the DOA == DOD columns.
AngleSpectrum init_diagonal(const Measurement& y, const ArrayModel& model);
AngleSpectrum init_diagonal(const CVector& y, const ArrayModel& model);

// X^0_i = a_i^H y / a_i^H a_i.
AngleSpectrum init_matched_filter(const CVector& y, const ArrayModel& model);

// i.i.d. CN(0, 1) entries.
AngleSpectrum init_random(const ArrayModel& model, std::mt19937_64& rng);

// delta for the covariance of x given the measurement noise level.
double effective_loading(const CVector& x, const ArrayModel& model, const SolverParams& params,
                         double noise_variance);

CovarianceState build_covariance(const CVector& x, const ArrayModel& model, double loading);

CellStatistics per_cell_statistics(const CovarianceState& cov, Complex x_i,
                                   const Eigen::Ref<const CVector>& a_i, const CVector& y);

// Statistics of every cell, vector-index order.
std::vector<CellStatistics> all_cell_statistics(const CovarianceState& cov, const CVector& x,
                                                const ArrayModel& model, const CVector& y);

// D beta / (D gamma + lambda).
Complex regularized_update(Complex beta, double gamma, double support, double lambda);

// |X_gg|^2 + |X_qq|^2 + eps0 for every cell, G x G.
Eigen::MatrixXd support_weights(const AngleSpectrum& x, double eps0);

AngleSpectrum tigre_step(const AngleSpectrum& x_n, const CVector& y, const CovarianceState& cov,
                         const SolverParams& params, const ArrayModel& model);
// Same update visiting the cells in the given order (a permutation of 0..G^2-1).
AngleSpectrum tigre_step(const AngleSpectrum& x_n, const CVector& y, const CovarianceState& cov,
                         const SolverParams& params, const ArrayModel& model,
                         std::span<const std::size_t> order);

AngleSpectrum mpiaa_step(const AngleSpectrum& x_n, const CVector& y, const CovarianceState& cov,
                         const ArrayModel& model);

// One summand of the regularized loss for cell value `value`.
double cell_loss(Complex value, const CellStatistics& stats, double lambda, double support);

// sum over cells of (y - X_gq a_i)^H Q_i^{-1} (y - X_gq a_i) + lambda |X_gq|^2 / D^n_gq,
// with Q_i and D^n taken from x_n (cov must be built from x_n).
double loss_value(const AngleSpectrum& x, const AngleSpectrum& x_n, const CVector& y,
                  const CovarianceState& cov, const SolverParams& params, const ArrayModel& model);

// sum_g |z_next_g|^2 / (2 |z_n_g|^2 + eps0). Tends to ||z||_0 / 2 at a fixed point.
double diag_regularizer_value(const CVector& z_next, const CVector& z_n, double eps0);

// Full iteration from the configured initializer until ||x^{n+1} - x^n|| < eps_x
// or max_iters. `seed` drives the random initializer only.
SolverReport run(const Measurement& y, const ArrayModel& model, const SolverParams& params,
                 std::uint64_t seed = 0);

// Same, starting from a caller-provided spectrum.
SolverReport run_from(const AngleSpectrum& x0, const Measurement& y, const ArrayModel& model,
                      const SolverParams& params);

}  // namespace tigre
