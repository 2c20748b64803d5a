#pragma once

#include "qscissors/herald.hpp"
#include "qscissors/nla.hpp"

#include <complex>
#include <vector>

namespace qscissors {

using Complex = std::complex<double>;

/// Pure state on M modes, each truncated to photon numbers 0..cutoff-1.
/// Amplitudes are stored row-major with mode 0 most significant.
class FockVector {
 public:
  FockVector(std::size_t modes, int cutoff);

  std::size_t num_modes() const { return modes_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return amp_.size(); }
  std::size_t stride(std::size_t mode) const;
  std::size_t index(const std::vector<int>& photons) const;

  Complex& operator[](std::size_t i) { return amp_[i]; }
  const Complex& operator[](std::size_t i) const { return amp_[i]; }
  std::vector<Complex>& amplitudes() { return amp_; }
  const std::vector<Complex>& amplitudes() const { return amp_; }

  double norm_squared() const;
  /// Probability mass discarded by truncation so far.
  double truncated_mass() const { return truncated_; }
  void add_truncated(double m) { truncated_ += m; }

 private:
  std::size_t modes_;
  int cutoff_;
  std::vector<Complex> amp_;
  double truncated_ = 0.0;
};

/// Density operator on M truncated modes.
struct FockDensity {
  std::size_t modes;
  int cutoff;
  Eigen::MatrixXcd rho;
  double truncated_mass = 0.0;
};

FockVector fock_vacuum(std::size_t modes, int cutoff);
/// TMSV(mu) on two modes, truncated and not renormalised.
FockVector fock_tmsv(double mu, int cutoff);
FockVector fock_tensor(const FockVector& a, const FockVector& b);
FockDensity to_density(const FockVector& v);

/// Beamsplitter with the same convention as the phase-space one:
/// a_i^dag -> sqrt(t) a_i^dag - sqrt(1-t) a_j^dag, a_j^dag -> sqrt(1-t) a_i^dag + sqrt(t) a_j^dag.
/// Amplitude pushed above the cutoff is dropped and recorded as truncated mass.
void fock_beamsplitter(FockVector& v, double t, std::size_t i, std::size_t j, bool inverse = false);
void fock_beamsplitter(FockDensity& d, double t, std::size_t i, std::size_t j, bool inverse = false);
/// exp(i theta n) on one mode.
void fock_phase(FockVector& v, double theta, std::size_t mode);
void fock_phase(FockDensity& d, double theta, std::size_t mode);

/// Pure loss through its Kraus operators.
FockDensity fock_loss(const FockDensity& d, double eta, std::size_t mode);

struct ScissorsOutcome {
  FockVector state;     // normalised
  double probability;
};
/// Ideal scissors (|0><0| + g |1><1|) / sqrt(1 + g^2) on one mode.
ScissorsOutcome fock_scissors_exact(const FockVector& v, double g, std::size_t mode);

/// Threshold-detector projection; modes not listed in the pattern are traced out.
/// Returns the normalised state of the kept modes and the outcome probability.
std::pair<FockDensity, double> fock_onoff(const FockVector& v, const OnOffPattern& pattern);
std::pair<FockDensity, double> fock_onoff(const FockDensity& d, const OnOffPattern& pattern);

/// Phase-space mean and covariance (vacuum = identity) of a Fock density.
QMoments fock_moments(const FockDensity& d);

/// Largest population of the top Fock level over all modes.
double top_level_population(const FockDensity& d);

struct OracleResult {
  double probability;      // p_succ' summed over click patterns
  Vec mean;
  Mat cov;
  double truncated_mass;   // mass dropped by truncating the pure state
  double top_population;   // population of the top Fock level in the heralded state
};

/// Single-scissor circuit built directly in Fock space, with loss purified by an
/// environment mode. Only N = 1 is supported.
OracleResult fock_scissors_oracle(const ScissorsConfig& cfg, int cutoff);

/// Replays a layout in Fock space (loss via extra environment modes) and heralds `pattern`.
/// Returns the unnormalised density of the kept modes and its trace.
std::pair<FockDensity, double> fock_replay(const CircuitLayout& layout, const OnOffPattern& pattern,
                                           int cutoff);

/// Fock replay of herald_nla, summing all click assignments.
OracleResult fock_nla_replay(const ScissorsConfig& cfg, int cutoff);

}  // namespace qscissors
