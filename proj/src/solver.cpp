#include "tigre/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tigre/errors.hpp"

namespace tigre {

namespace {

// Downdate denominators at or below this fall back to a direct solve.
constexpr double kDowndateTolerance = 1e-12;
// Cholesky reciprocal condition below which init_diagonal uses the
// minimum-norm solve instead of the normal equations.
// Relative pivot size below which a dictionary direction counts as degenerate.
constexpr double kRankThreshold = 1e-10;
constexpr double kNormalEquationsRcond = 1e-10;

// Separates the random-initializer stream from the noise stream of the same seed.
constexpr std::uint64_t kInitStreamSalt = 0x9E3779B97F4A7C15ULL;

std::string cell_name(std::size_t i, std::size_t g) {
  std::ostringstream out;
  out << "(doa " << i % g << ", dod " << i / g << ")";
  return out.str();
}

CellStatistics direct_statistics(const CovarianceState& cov, double power,
                                 const Eigen::Ref<const CVector>& a, const CVector& y) {
  CMatrix q = cov.r - power * a * a.adjoint();
  Eigen::PartialPivLU<CMatrix> lu(q);
  const CVector qa = lu.solve(a);
  const CVector qy = lu.solve(y);
  CellStatistics s;
  s.beta = a.dot(qy);
  s.gamma = a.dot(qa).real();
  s.y_weighted_norm = y.dot(qy).real();
  s.fallback = true;
  return s;
}

// Leave-one-out statistics given u = R^{-1} a and the shared products
// R^{-1} y and y^H R^{-1} y.
CellStatistics downdated_statistics(const CovarianceState& cov, double power,
                                    const Eigen::Ref<const CVector>& a, const Eigen::Ref<const CVector>& u,
                                    const CVector& r_inv_y, double y_r_inv_y, const CVector& y) {
  const double s = a.dot(u).real();
  const double denom = 1.0 - power * s;
  if (!(denom > kDowndateTolerance)) return direct_statistics(cov, power, a, y);

  // Q^{-1} = R^{-1} + power u u^H / denom
  const Complex u_y = u.dot(y);
  const double scale = power / denom;
  CellStatistics st;
  st.beta = a.dot(r_inv_y) + scale * a.dot(u) * u_y;
  st.gamma = s + scale * s * s;
  st.y_weighted_norm = y_r_inv_y + scale * std::norm(u_y);
  return st;
}

AngleSpectrum apply_update(const AngleSpectrum& x_n, const std::vector<CellStatistics>& stats,
                           const SolverParams& params, std::span<const std::size_t> order) {
  const std::size_t g = x_n.size();
  const Eigen::MatrixXd support = support_weights(x_n, params.eps0);
  AngleSpectrum next(x_n.grid());
  for (const std::size_t i : order) {
    const std::size_t doa = i % g;
    const std::size_t dod = i / g;
    const CellStatistics& st = stats[i];
    const Complex v = params.method == Method::mp_iaa
                          ? st.beta / st.gamma
                          : regularized_update(st.beta, st.gamma, support(doa, dod), params.lambda(doa, dod));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw SolverError("non-finite update at cell " + cell_name(i, g));
    }
    next(doa, dod) = v;
  }
  return next;
}

std::vector<std::size_t> natural_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

double loss_from_statistics(const AngleSpectrum& x, const AngleSpectrum& x_n,
                            const std::vector<CellStatistics>& stats, const SolverParams& params) {
  const std::size_t g = x.size();
  const Eigen::MatrixXd support = support_weights(x_n, params.eps0);
  double total = 0.0;
  for (std::size_t q = 0; q < g; ++q) {
    for (std::size_t d = 0; d < g; ++d) {
      total += cell_loss(x(d, q), stats[d + q * g], params.lambda(d, q), support(d, q));
    }
  }
  return total;
}

}  // namespace

std::string to_string(Method method) { return method == Method::tigre ? "TIGRE" : "MP-IAA"; }

std::string to_string(Init init) {
  switch (init) {
    case Init::diagonal_ls: return "diagonal_ls";
    case Init::matched_filter: return "matched_filter";
    case Init::random: return "random";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  if (text == "TIGRE" || text == "tigre") return Method::tigre;
  if (text == "MP-IAA" || text == "mp-iaa" || text == "mp_iaa") return Method::mp_iaa;
  throw DomainError("unknown method '" + text + "'");
}

Init parse_init(const std::string& text) {
  if (text == "diagonal_ls") return Init::diagonal_ls;
  if (text == "matched_filter") return Init::matched_filter;
  if (text == "random") return Init::random;
  throw DomainError("unknown init '" + text + "'");
}

void SolverParams::validate() const {
  if (!(lambda_diag >= 0.0) || !(lambda_offdiag >= 0.0)) throw DomainError("lambdas must be nonnegative");
  if (!(eps0 > 0.0)) throw DomainError("eps0 must be positive");
  if (!(eps_x > 0.0)) throw DomainError("eps_x must be positive");
  if (max_iters < 1) throw DomainError("max_iters must be at least 1");
  if (!(diag_loading >= 0.0) || !std::isfinite(diag_loading)) throw DomainError("diag_loading must be nonnegative");
  if (!(noise_loading >= 0.0) || !std::isfinite(noise_loading)) throw DomainError("noise_loading must be nonnegative");
}

double SolverParams::lambda(std::size_t doa, std::size_t dod) const {
  if (method == Method::mp_iaa) return 0.0;
  return doa == dod ? lambda_diag : lambda_offdiag;
}

AngleSpectrum init_diagonal(const Measurement& y, const ArrayModel& model) { return init_diagonal(y.y, model); }

AngleSpectrum init_diagonal(const CVector& y, const ArrayModel& model) {
  if (y.size() != model.channels()) throw DomainError("measurement length does not match the radar");
  const CMatrix c = model.diagonal_dictionary();
  const CMatrix gram = c.adjoint() * c;
  const CVector rhs = c.adjoint() * y;

  CVector z;
  Eigen::LLT<CMatrix> llt(gram);
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (rcond > kNormalEquationsRcond) {
    z = llt.solve(rhs);
  } else {
    // Minimum-norm least squares; duplicate steering columns (e.g. +-90 deg at
    // half-wavelength spacing) make the normal equations singular.
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod;
    cod.setThreshold(kRankThreshold);
    cod.compute(c);
    z = cod.solve(y);
  }
  if (!z.allFinite()) {
    std::ostringstream msg;
    msg << "diagonal initializer failed (normal-equation rcond " << rcond << ")";
    throw SolverError(msg.str());
  }
  AngleSpectrum x0(model.grid());
  x0.values().diagonal() = z;
  return x0;
}

AngleSpectrum init_matched_filter(const CVector& y, const ArrayModel& model) {
  if (y.size() != model.channels()) throw DomainError("measurement length does not match the radar");
  const CMatrix& a = model.dictionary();
  CVector x = a.adjoint() * y;
  x.array() /= a.colwise().squaredNorm().transpose().array().cast<Complex>();
  return AngleSpectrum::from_vec(model.grid(), x);
}

AngleSpectrum init_random(const ArrayModel& model, std::mt19937_64& rng) {
  return AngleSpectrum::from_vec(model.grid(), complex_gaussian(static_cast<Eigen::Index>(model.cells()), 1.0, rng));
}

double effective_loading(const CVector& x, const ArrayModel& model, const SolverParams& params,
                         double noise_variance) {
  // mean diag of A diag(p) A^H = sum_i p_i ||a_i||^2 / N
  const double signal = (model.dictionary().colwise().squaredNorm().transpose().array() * x.array().abs2()).sum() /
                        static_cast<double>(model.channels());
  const double delta = params.diag_loading * signal + params.noise_loading * noise_variance;
  return delta > 0.0 ? delta : params.diag_loading;
}

CovarianceState build_covariance(const CVector& x, const ArrayModel& model, double loading) {
  if (x.size() != static_cast<Eigen::Index>(model.cells())) throw DomainError("spectrum length does not match the grid");
  if (!x.allFinite()) throw DomainError("spectrum has non-finite entries");
  if (!(loading >= 0.0) || !std::isfinite(loading)) throw DomainError("diagonal loading must be nonnegative");

  const CMatrix& a = model.dictionary();
  const Eigen::VectorXd power = x.cwiseAbs2();
  CovarianceState cov;
  cov.loading = loading;
  cov.r = a * power.asDiagonal() * a.adjoint();
  cov.r.diagonal().array() += loading;
  cov.r = (0.5 * (cov.r + cov.r.adjoint())).eval();

  const auto n = cov.r.rows();
  Eigen::LLT<CMatrix> llt(cov.r);
  if (llt.info() != Eigen::Success) throw SolverError("covariance is not positive definite; increase the loading");
  cov.r_inv = llt.solve(CMatrix::Identity(n, n));
  cov.r_inv = (0.5 * (cov.r_inv + cov.r_inv.adjoint())).eval();
  return cov;
}

CellStatistics per_cell_statistics(const CovarianceState& cov, Complex x_i,
                                   const Eigen::Ref<const CVector>& a_i, const CVector& y) {
  if (a_i.size() != cov.r.rows() || y.size() != cov.r.rows()) throw DomainError("dimension mismatch");
  const CVector u = cov.r_inv * a_i;
  const CVector r_inv_y = cov.r_inv * y;
  return downdated_statistics(cov, std::norm(x_i), a_i, u, r_inv_y, y.dot(r_inv_y).real(), y);
}

std::vector<CellStatistics> all_cell_statistics(const CovarianceState& cov, const CVector& x,
                                                const ArrayModel& model, const CVector& y) {
  if (y.size() != model.channels()) throw DomainError("measurement length does not match the radar");
  const CMatrix& a = model.dictionary();
  const CMatrix u = cov.r_inv * a;
  const CVector r_inv_y = cov.r_inv * y;
  const double y_r_inv_y = y.dot(r_inv_y).real();

  std::vector<CellStatistics> stats(model.cells());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    stats[static_cast<std::size_t>(i)] =
        downdated_statistics(cov, std::norm(x(i)), a.col(i), u.col(i), r_inv_y, y_r_inv_y, y);
  }
  return stats;
}

Complex regularized_update(Complex beta, double gamma, double support, double lambda) {
  return support * beta / (support * gamma + lambda);
}

Eigen::MatrixXd support_weights(const AngleSpectrum& x, double eps0) {
  const Eigen::VectorXd p = x.diagonal().cwiseAbs2();
  const auto g = p.size();
  Eigen::MatrixXd d(g, g);
  for (Eigen::Index q = 0; q < g; ++q) {
    for (Eigen::Index r = 0; r < g; ++r) d(r, q) = p(r) + p(q) + eps0;
  }
  return d;
}

AngleSpectrum tigre_step(const AngleSpectrum& x_n, const CVector& y, const CovarianceState& cov,
                         const SolverParams& params, const ArrayModel& model) {
  return tigre_step(x_n, y, cov, params, model, natural_order(model.cells()));
}

AngleSpectrum tigre_step(const AngleSpectrum& x_n, const CVector& y, const CovarianceState& cov,
                         const SolverParams& params, const ArrayModel& model,
                         std::span<const std::size_t> order) {
  if (order.size() != model.cells()) throw DomainError("cell order must visit every cell once");
  const auto stats = all_cell_statistics(cov, x_n.vec(), model, y);
  SolverParams p = params;
  p.method = Method::tigre;
  return apply_update(x_n, stats, p, order);
}

AngleSpectrum mpiaa_step(const AngleSpectrum& x_n, const CVector& y, const CovarianceState& cov,
                         const ArrayModel& model) {
  const auto stats = all_cell_statistics(cov, x_n.vec(), model, y);
  SolverParams p;
  p.method = Method::mp_iaa;
  return apply_update(x_n, stats, p, natural_order(model.cells()));
}

double cell_loss(Complex value, const CellStatistics& stats, double lambda, double support) {
  // (y - v a)^H W (y - v a) = y^H W y - 2 Re(conj(v) a^H W y) + |v|^2 a^H W a
  const double fit = stats.y_weighted_norm - 2.0 * (std::conj(value) * stats.beta).real() +
                     std::norm(value) * stats.gamma;
  return fit + lambda * std::norm(value) / support;
}

double loss_value(const AngleSpectrum& x, const AngleSpectrum& x_n, const CVector& y,
                  const CovarianceState& cov, const SolverParams& params, const ArrayModel& model) {
  if (x.size() != model.grid_size() || x_n.size() != model.grid_size()) throw DomainError("dimension mismatch");
  return loss_from_statistics(x, x_n, all_cell_statistics(cov, x_n.vec(), model, y), params);
}

double diag_regularizer_value(const CVector& z_next, const CVector& z_n, double eps0) {
  if (z_next.size() != z_n.size()) throw DomainError("diagonal vectors differ in length");
  return (z_next.cwiseAbs2().array() / (2.0 * z_n.cwiseAbs2().array() + eps0)).sum();
}

SolverReport run(const Measurement& y, const ArrayModel& model, const SolverParams& params, std::uint64_t seed) {
  params.validate();
  switch (params.init) {
    case Init::diagonal_ls: return run_from(init_diagonal(y.y, model), y, model, params);
    case Init::matched_filter: return run_from(init_matched_filter(y.y, model), y, model, params);
    case Init::random: {
      std::mt19937_64 rng(seed ^ kInitStreamSalt);
      return run_from(init_random(model, rng), y, model, params);
    }
  }
  throw DomainError("unknown initializer");
}

SolverReport run_from(const AngleSpectrum& x0, const Measurement& y, const ArrayModel& model,
                      const SolverParams& params) {
  params.validate();
  if (y.y.size() != model.channels()) throw DomainError("measurement length does not match the radar");
  if (x0.size() != model.grid_size()) throw DomainError("initial spectrum does not match the grid");

  const auto start = std::chrono::steady_clock::now();
  SolverReport report{x0, 0, false, {}, 0.0};
  const auto order = natural_order(model.cells());

  AngleSpectrum current = x0;
  for (int n = 0; n < params.max_iters; ++n) {
    const CVector x = current.vec();
    const double loading = effective_loading(x, model, params, y.noise_variance());
    if (!x.allFinite() || !std::isfinite(loading)) {
      throw SolverError("iterate overflowed at iteration " + std::to_string(n + 1) +
                        " (measurement magnitude too large?)");
    }
    const CovarianceState cov = build_covariance(x, model, loading);
    const auto stats = all_cell_statistics(cov, x, model, y.y);
    AngleSpectrum next = apply_update(current, stats, params, order);

    IterationRecord rec;
    rec.change_norm = (next.vec() - x).norm();
    rec.loss = loss_from_statistics(next, current, stats, params);
    rec.diag_reg_value = diag_regularizer_value(next.diagonal(), current.diagonal(), params.eps0);
    for (const auto& s : stats) rec.fallback_cells += s.fallback ? 1 : 0;
    report.trace.push_back(rec);

    current = std::move(next);
    report.iterations = n + 1;
    if (rec.change_norm < params.eps_x) {
      report.converged = true;
      break;
    }
  }
  report.spectrum = std::move(current);
  report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace tigre
