#pragma once

#include "qscissors/numerics.hpp"
#include "qscissors/tolerances.hpp"

#include <complex>
#include <iosfwd>
#include <vector>

namespace qscissors {

using ModeList = std::vector<std::size_t>;

// Phase-space vectors are ordered (x_1, ..., x_M, p_1, ..., p_M).
// The vacuum has identity covariance.

/// Symplectic form Omega = [[0, I], [-I, 0]] for M modes.
Mat symplectic_form(std::size_t modes);

/// Indices of the quadratures of `modes` inside a 2M vector: all x's, then all p's.
std::vector<Eigen::Index> quadrature_indices(const ModeList& modes, std::size_t total_modes);

/// Rows and columns of `m` selected by `idx`.
Mat submatrix(const Mat& m, const std::vector<Eigen::Index>& rows,
              const std::vector<Eigen::Index>& cols);
Vec subvector(const Vec& v, const std::vector<Eigen::Index>& idx);

/// Sorted symplectic eigenvalues (one per mode) of a covariance matrix.
Vec symplectic_eigenvalues(const Mat& cov);

/// Smallest symplectic eigenvalue minus one; negative means unphysical.
double physicality_margin(const Mat& cov);
/// Allowed negative margin: the base tolerance, widened for large entries where
/// double rounding alone moves the symplectic spectrum by about eps * max|V|^2.
double physicality_tolerance(const Mat& cov);

/// Mean and covariance of an M-mode Gaussian state.
class GaussianState {
 public:
  /// Throws std::invalid_argument unless cov is square, symmetric and satisfies V + i Omega >= 0.
  GaussianState(Vec mean, Mat cov);

  std::size_t num_modes() const { return static_cast<std::size_t>(mean_.size() / 2); }
  const Vec& mean() const { return mean_; }
  const Mat& cov() const { return cov_; }

 private:
  Vec mean_;
  Mat cov_;
};

/// A 2M x 2M real matrix preserving Omega.
class SymplecticOp {
 public:
  explicit SymplecticOp(Mat matrix);

  std::size_t num_modes() const { return static_cast<std::size_t>(m_.rows() / 2); }
  const Mat& matrix() const { return m_; }
  SymplecticOp inverse() const;
  /// (a * b) applies b first.
  friend SymplecticOp operator*(const SymplecticOp& a, const SymplecticOp& b);

 private:
  Mat m_;
};

GaussianState vacuum(std::size_t modes);
/// Two-mode squeezed vacuum with mean photon number mu per mode.
GaussianState tmsv(double mu);
GaussianState thermal(double mean_photons);
GaussianState coherent(double x, double p);
/// Direct sum: the modes of b follow the modes of a.
GaussianState tensor(const GaussianState& a, const GaussianState& b);

/// Beamsplitter of transmissivity t on modes (i, j):
/// x_i -> sqrt(t) x_i + sqrt(1-t) x_j, x_j -> -sqrt(1-t) x_i + sqrt(t) x_j, same for p.
SymplecticOp beamsplitter(double t, std::size_t i, std::size_t j, std::size_t modes);
SymplecticOp phase_rotation(double theta, std::size_t mode, std::size_t modes);
SymplecticOp squeezer(double r, std::size_t mode, std::size_t modes);
/// Two-mode squeezer; on vacuum it prepares tmsv(sinh(r)^2) on (a, b).
SymplecticOp two_mode_squeezer(double r, std::size_t a, std::size_t b, std::size_t modes);
SymplecticOp identity_op(std::size_t modes);

GaussianState apply(const GaussianState& state, const SymplecticOp& op);
GaussianState displace(const GaussianState& state, const Vec& d);
/// Pure-loss channel of transmissivity eta on one mode.
GaussianState pure_loss(const GaussianState& state, double eta, std::size_t mode);
/// Reduced state on `keep`, in the order given.
GaussianState partial_trace(const GaussianState& state, const ModeList& keep);
/// Reorder modes: output mode k is input mode order[k].
GaussianState permute(const GaussianState& state, const ModeList& order);

enum class MeasurementKind { heterodyne, vacuum_projection, homodyne_x, homodyne_p, dual_homodyne, general };

/// A Gaussian measurement on a set of modes.
/// Heterodyne and vacuum projection have meas_cov = I. Homodyne is the singular limit of
/// infinite squeezing and is conditioned analytically; meas_cov is unused for it.
/// Dual homodyne mixes its two modes on a balanced beamsplitter, then reads x of the first
/// output and p of the second; outcome = (gamma_x, gamma_p).
struct GaussianMeasurement {
  MeasurementKind kind = MeasurementKind::heterodyne;
  ModeList modes;
  Vec outcome;
  Mat meas_cov;

  static GaussianMeasurement heterodyne(ModeList modes, Vec outcome);
  static GaussianMeasurement vacuum_projection(ModeList modes);
  static GaussianMeasurement homodyne_x(std::size_t mode, double outcome);
  static GaussianMeasurement homodyne_p(std::size_t mode, double outcome);
  static GaussianMeasurement dual_homodyne(std::size_t a, std::size_t b, double gx, double gp);
  static GaussianMeasurement general(ModeList modes, Vec outcome, Mat meas_cov);
};

struct Conditioned {
  GaussianState state;
  /// Outcome density for continuous outcomes; the outcome probability for vacuum projection.
  double density;
};

/// Post-measurement state of the unmeasured modes (original order) and the outcome weight.
Conditioned condition(const GaussianState& state, const GaussianMeasurement& m);

/// Probability that every mode in `modes` is found in vacuum.
double vacuum_probability(const GaussianState& state, const ModeList& modes);

/// Fourier transform of the Wigner function: chi(xi) = exp(i xi.s - xi^T V xi / 4).
std::complex<double> characteristic_function(const GaussianState& state, const Vec& xi);

/// Plain-text matrix dump: a "rows cols" line, then rows of 17-significant-digit numbers.
void write_matrix(std::ostream& out, const Mat& m);
Mat read_matrix(std::istream& in);

}  // namespace qscissors
