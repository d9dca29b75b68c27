#pragma once

// Array model for a co-located MIMO radar observing a discretized
// DOA/DOD angle grid.
//
// Conventions used throughout the library:
//  * Angles are in degrees everywhere except inside steering_vector().
//  * The angle spectrum X is G x G with rows indexed by DOA (receive angle)
//    and columns by DOD (transmit angle).
//  * vec(X) stacks columns, so cell (g, q) maps to vector index g + q*G
//    (0-based).
//  * The measurement model is y = vec(A_r X A_t^T) + e. Under column-stacking
//    this equals (A_t kron A_r) vec(X), so the dictionary column for cell
//    (g, q) is a_t(theta_q) kron a_r(theta_g).

#include <complex>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tigre {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct RadarConfig {
  int n_tx = 8;
  int n_rx = 8;
  double tx_spacing = 0.5;  // element spacing in wavelengths
  double rx_spacing = 0.5;

  void validate() const;
  int channels() const { return n_tx * n_rx; }
  bool operator==(const RadarConfig&) const = default;
};

class AngleGrid {
 public:
  explicit AngleGrid(std::vector<double> angles_deg);

  // Points min, min+step, ..., max. (max - min) must be a whole number of steps.
  static AngleGrid uniform(double min_deg, double max_deg, double step_deg);
  // -70..70 degrees at 10 degree spacing.
  static AngleGrid default_grid();

  std::size_t size() const { return angles_.size(); }
  double operator[](std::size_t i) const { return angles_[i]; }
  const std::vector<double>& degrees() const { return angles_; }

  // Index of the grid point within tol_deg of angle_deg, if any.
  std::optional<std::size_t> index_of(double angle_deg, double tol_deg = 1e-9) const;

  bool operator==(const AngleGrid&) const = default;

 private:
  std::vector<double> angles_;
};

// G x G complex amplitudes over (DOA, DOD) cells.
class AngleSpectrum {
 public:
  explicit AngleSpectrum(AngleGrid grid);
  AngleSpectrum(AngleGrid grid, CMatrix values);

  static AngleSpectrum from_vec(AngleGrid grid, const CVector& x);

  const AngleGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }
  const CMatrix& values() const { return values_; }
  CMatrix& values() { return values_; }

  Complex operator()(std::size_t doa, std::size_t dod) const { return values_(doa, dod); }
  Complex& operator()(std::size_t doa, std::size_t dod) { return values_(doa, dod); }

  CVector vec() const;
  CVector diagonal() const { return values_.diagonal(); }

  std::size_t cell_index(std::size_t doa, std::size_t dod) const { return doa + dod * size(); }

 private:
  AngleGrid grid_;
  CMatrix values_;
};

enum class EmitterKind { actual, ghost };

std::string to_string(EmitterKind kind);

// A scatterer on the grid. DOA == DOD is a direct-path (actual) target,
// anything else a multipath ghost.
struct Emitter {
  double magnitude = 0.0;
  double phase_deg = 0.0;
  double doa_deg = 0.0;
  double dod_deg = 0.0;

  Complex amplitude() const;
  EmitterKind kind() const { return doa_deg == dod_deg ? EmitterKind::actual : EmitterKind::ghost; }
  bool operator==(const Emitter&) const = default;
};

Emitter make_emitter(double magnitude, double doa_deg, double dod_deg, double phase_deg = 0.0);

struct Scene {
  std::vector<Emitter> emitters;
  bool operator==(const Scene&) const = default;
};

struct Measurement {
  CVector y;
  double noise_sigma = 0.0;  // E|e_k|^2 = noise_sigma^2 for each channel
  double snr_db = 0.0;

  double noise_variance() const { return noise_sigma * noise_sigma; }
};

// [1, e^{j 2 pi d sin(theta)}, ..., e^{j 2 pi d (n-1) sin(theta)}]^T
CVector steering_vector(double theta_deg, int n, double spacing_wl);

// Column g is steering_vector(grid[g], n, spacing_wl).
CMatrix steering_matrix(const AngleGrid& grid, int n, double spacing_wl);

// Radar geometry plus grid with the precomputed steering matrices and the
// full N x G^2 dictionary (N = n_tx * n_rx).
class ArrayModel {
 public:
  ArrayModel(RadarConfig radar, AngleGrid grid);

  const RadarConfig& radar() const { return radar_; }
  const AngleGrid& grid() const { return grid_; }
  std::size_t grid_size() const { return grid_.size(); }
  std::size_t cells() const { return grid_.size() * grid_.size(); }
  int channels() const { return radar_.channels(); }

  const CMatrix& rx_steering() const { return a_rx_; }
  const CMatrix& tx_steering() const { return a_tx_; }
  const CMatrix& dictionary() const { return dictionary_; }

  // Dictionary column for cell (doa, dod), 0-based.
  CVector dictionary_column(std::size_t doa, std::size_t dod) const;
  // Column of the dictionary for vector index i = doa + dod*G.
  auto column(std::size_t i) const { return dictionary_.col(static_cast<Eigen::Index>(i)); }

  // The G columns belonging to the DOA == DOD cells.
  CMatrix diagonal_dictionary() const;

 private:
  RadarConfig radar_;
  AngleGrid grid_;
  CMatrix a_rx_;
  CMatrix a_tx_;
  CMatrix dictionary_;
};

// Places every emitter at its (DOA, DOD) cell. Emitters sharing a cell add.
// Throws DomainError naming the emitter when an angle is not a grid point.
AngleSpectrum spectrum_from_scene(const Scene& scene, const AngleGrid& grid);

// Noise-free measurement A vec(X).
CVector forward(const AngleSpectrum& spectrum, const ArrayModel& model);

// Adds circularly-symmetric complex Gaussian noise with per-component variance
// ||y||^2 / (N 10^(snr/10)). snr_db = +inf leaves y untouched.
Measurement add_noise(const CVector& y_clean, double snr_db, std::mt19937_64& rng);

// Draws n i.i.d. CN(0, variance) samples.
CVector complex_gaussian(Eigen::Index n, double variance, std::mt19937_64& rng);

}  // namespace tigre
