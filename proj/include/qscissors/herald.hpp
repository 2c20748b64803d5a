#pragma once

#include "qscissors/gaussian.hpp"

#include <cstdint>
#include <vector>

namespace qscissors {

/// Threshold-detector outcome: `off` modes saw nothing, `on` modes clicked, `kept` modes are
/// returned. Modes listed nowhere are traced out.
struct OnOffPattern {
  ModeList off;
  ModeList on;
  ModeList kept;

  /// Throws std::invalid_argument on out-of-range or overlapping modes.
  void validate(std::size_t num_modes) const;
};

struct MixtureComponent {
  Quad weight;
  QVec mean;
  QMat cov;
};

/// A finite signed combination of Gaussians on the kept modes.
class SignedGaussianMixture {
 public:
  explicit SignedGaussianMixture(std::size_t modes) : modes_(modes) {}

  void add(MixtureComponent c);
  /// Appends every component of `other` with its weight multiplied by `scale`.
  void append(const SignedGaussianMixture& other, const Quad& scale = Quad(1));

  std::size_t num_modes() const { return modes_; }
  const std::vector<MixtureComponent>& components() const { return components_; }
  /// Compensated sum of the signed weights.
  Quad total_weight() const;
  Quad absolute_weight() const;
  /// sum |w| / |sum w|; the factor by which rounding errors are amplified.
  double cancellation_ratio() const;

 private:
  std::size_t modes_;
  std::vector<MixtureComponent> components_;
};

struct QMoments {
  Vec mean;
  Mat cov;
};

/// Mean and covariance of the normalised mixture, computed through its Husimi Q function.
/// Throws HeraldError when the total weight is below the probability floor and
/// NumericalError when cancellation or rounding leaves the result meaningless.
QMoments q_moments(const SignedGaussianMixture& mixture);

struct HeraldResult {
  double probability;
  Vec mean;
  Mat cov;
  SignedGaussianMixture mixture;
};

/// Precomputed inclusion-exclusion terms for a fixed covariance and pattern.
/// Only the means and weights depend on the first moments, so one plan serves many
/// displaced copies of the same state.
class HeraldPlan {
 public:
  HeraldPlan(const Mat& cov, const OnOffPattern& pattern);

  std::size_t num_modes() const { return total_modes_; }
  const OnOffPattern& pattern() const { return pattern_; }
  SignedGaussianMixture evaluate(const Vec& mean) const;

 private:
  struct Term {
    bool negative;
    std::vector<Eigen::Index> projected;  // quadratures projected onto vacuum
    Quad log_norm;                         // |P| log 2 - log det(V_P + I) / 2
    QMat inv;                              // (V_P + I)^-1
    QMat gain;                             // V_KP (V_P + I)^-1
    QMat cov;                              // conditional covariance of the kept modes
  };
  std::size_t total_modes_;
  OnOffPattern pattern_;
  std::vector<Eigen::Index> kept_;
  std::vector<Term> terms_;
};

/// Unnormalised post-selected state as a signed Gaussian mixture.
SignedGaussianMixture herald_mixture(const GaussianState& state, const OnOffPattern& pattern);

/// Probability of the pattern; `kept` may be empty.
double heralding_probability(const GaussianState& state, const OnOffPattern& pattern);

/// Heralded state of the kept modes with its exact first and second moments.
HeraldResult herald(const GaussianState& state, const OnOffPattern& pattern);

/// Builds a HeraldResult from an already assembled mixture.
HeraldResult finish_herald(SignedGaussianMixture mixture);

}  // namespace qscissors
