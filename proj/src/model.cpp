#include "tigre/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tigre/errors.hpp"

namespace tigre {

void RadarConfig::validate() const {
  if (n_tx < 1 || n_rx < 1) {
    throw DomainError("radar needs at least one transmit and one receive element");
  }
  if (!(tx_spacing > 0.0) || !(rx_spacing > 0.0) || !std::isfinite(tx_spacing) ||
      !std::isfinite(rx_spacing)) {
    throw DomainError("element spacings must be positive and finite");
  }
}

AngleGrid::AngleGrid(std::vector<double> angles_deg) : angles_(std::move(angles_deg)) {
  if (angles_.empty()) throw DomainError("angle grid is empty");
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    const double a = angles_[i];
    if (!std::isfinite(a) || a < -90.0 || a > 90.0) {
      std::ostringstream msg;
      msg << "grid angle " << a << " outside [-90, 90]";
      throw DomainError(msg.str());
    }
    if (i > 0 && !(a > angles_[i - 1])) throw DomainError("grid angles must be strictly increasing");
  }
}

AngleGrid AngleGrid::uniform(double min_deg, double max_deg, double step_deg) {
  if (!(step_deg > 0.0) || !std::isfinite(step_deg)) throw DomainError("grid step must be positive");
  if (!(max_deg >= min_deg)) throw DomainError("grid max must not be below grid min");
  const double span = (max_deg - min_deg) / step_deg;
  const double steps = std::round(span);
  if (std::abs(span - steps) > 1e-9) {
    throw DomainError("grid span is not a whole number of steps");
  }
  std::vector<double> angles;
  const auto count = static_cast<std::size_t>(steps) + 1;
  angles.reserve(count);
  for (std::size_t k = 0; k < count; ++k) angles.push_back(min_deg + static_cast<double>(k) * step_deg);
  angles.back() = max_deg;
  return AngleGrid(std::move(angles));
}

AngleGrid AngleGrid::default_grid() { return uniform(-70.0, 70.0, 10.0); }

std::optional<std::size_t> AngleGrid::index_of(double angle_deg, double tol_deg) const {
  auto it = std::lower_bound(angles_.begin(), angles_.end(), angle_deg - tol_deg);
  if (it != angles_.end() && std::abs(*it - angle_deg) <= tol_deg) {
    return static_cast<std::size_t>(it - angles_.begin());
  }
  return std::nullopt;
}

AngleSpectrum::AngleSpectrum(AngleGrid grid)
    : grid_(std::move(grid)),
      values_(CMatrix::Zero(static_cast<Eigen::Index>(grid_.size()),
                            static_cast<Eigen::Index>(grid_.size()))) {}

AngleSpectrum::AngleSpectrum(AngleGrid grid, CMatrix values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  const auto g = static_cast<Eigen::Index>(grid_.size());
  if (values_.rows() != g || values_.cols() != g) {
    throw DomainError("spectrum dimensions do not match the grid");
  }
}

AngleSpectrum AngleSpectrum::from_vec(AngleGrid grid, const CVector& x) {
  const auto g = static_cast<Eigen::Index>(grid.size());
  if (x.size() != g * g) throw DomainError("vectorized spectrum has wrong length");
  return AngleSpectrum(std::move(grid), Eigen::Map<const CMatrix>(x.data(), g, g));
}

CVector AngleSpectrum::vec() const { return values_.reshaped(); }

std::string to_string(EmitterKind kind) { return kind == EmitterKind::actual ? "actual" : "ghost"; }

Complex Emitter::amplitude() const {
  if (phase_deg == 0.0) return {magnitude, 0.0};
  return std::polar(magnitude, phase_deg * std::numbers::pi / 180.0);
}

Emitter make_emitter(double magnitude, double doa_deg, double dod_deg, double phase_deg) {
  return Emitter{magnitude, phase_deg, doa_deg, dod_deg};
}

CVector steering_vector(double theta_deg, int n, double spacing_wl) {
  if (!std::isfinite(theta_deg) || theta_deg < -90.0 || theta_deg > 90.0) {
    std::ostringstream msg;
    msg << "steering angle " << theta_deg << " outside [-90, 90]";
    throw DomainError(msg.str());
  }
  if (n < 1) throw DomainError("steering vector needs at least one element");
  const double phase_step = 2.0 * std::numbers::pi * spacing_wl * std::sin(theta_deg * std::numbers::pi / 180.0);
  CVector a(n);
  for (int k = 0; k < n; ++k) a(k) = std::polar(1.0, phase_step * k);
  return a;
}

CMatrix steering_matrix(const AngleGrid& grid, int n, double spacing_wl) {
  CMatrix a(n, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    a.col(static_cast<Eigen::Index>(g)) = steering_vector(grid[g], n, spacing_wl);
  }
  return a;
}

ArrayModel::ArrayModel(RadarConfig radar, AngleGrid grid) : radar_(radar), grid_(std::move(grid)) {
  radar_.validate();
  a_rx_ = steering_matrix(grid_, radar_.n_rx, radar_.rx_spacing);
  a_tx_ = steering_matrix(grid_, radar_.n_tx, radar_.tx_spacing);

  const auto g = static_cast<Eigen::Index>(grid_.size());
  const Eigen::Index n_rx = radar_.n_rx;
  dictionary_.resize(radar_.channels(), g * g);
  for (Eigen::Index q = 0; q < g; ++q) {
    for (Eigen::Index d = 0; d < g; ++d) {
      auto col = dictionary_.col(d + q * g);
      for (Eigen::Index kt = 0; kt < radar_.n_tx; ++kt) {
        col.segment(kt * n_rx, n_rx) = a_tx_(kt, q) * a_rx_.col(d);
      }
    }
  }
}

CVector ArrayModel::dictionary_column(std::size_t doa, std::size_t dod) const {
  if (doa >= grid_size() || dod >= grid_size()) throw DomainError("grid cell index out of range");
  return dictionary_.col(static_cast<Eigen::Index>(doa + dod * grid_size()));
}

CMatrix ArrayModel::diagonal_dictionary() const {
  const auto g = static_cast<Eigen::Index>(grid_size());
  CMatrix c(channels(), g);
  for (Eigen::Index k = 0; k < g; ++k) c.col(k) = dictionary_.col(k + k * g);
  return c;
}

AngleSpectrum spectrum_from_scene(const Scene& scene, const AngleGrid& grid) {
  AngleSpectrum spectrum(grid);
  for (std::size_t e = 0; e < scene.emitters.size(); ++e) {
    const Emitter& em = scene.emitters[e];
    const auto doa = grid.index_of(em.doa_deg);
    const auto dod = grid.index_of(em.dod_deg);
    if (!doa || !dod) {
      std::ostringstream msg;
      msg << "emitter " << e << " at (DOA " << em.doa_deg << ", DOD " << em.dod_deg
          << ") is not on the angle grid";
      throw DomainError(msg.str());
    }
    spectrum(*doa, *dod) += em.amplitude();
  }
  return spectrum;
}

CVector forward(const AngleSpectrum& spectrum, const ArrayModel& model) {
  if (spectrum.size() != model.grid_size()) throw DomainError("spectrum and model grids differ in size");
  return model.dictionary() * spectrum.vec();
}

CVector complex_gaussian(Eigen::Index n, double variance, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  CVector e(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    e(k) = Complex(re, im);
  }
  return e;
}

Measurement add_noise(const CVector& y_clean, double snr_db, std::mt19937_64& rng) {
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw DomainError("SNR must be a real number or +inf");
  }
  Measurement m{y_clean, 0.0, snr_db};
  if (std::isinf(snr_db) && snr_db > 0) return m;
  const double power = y_clean.squaredNorm();
  if (!(power > 0.0)) throw DomainError("cannot set a finite SNR on a zero signal");
  const double variance = power / (static_cast<double>(y_clean.size()) * std::pow(10.0, snr_db / 10.0));
  m.noise_sigma = std::sqrt(variance);
  m.y += complex_gaussian(y_clean.size(), variance, rng);
  return m;
}

}  // namespace tigre
