#pragma once

#include "qscissors/measures.hpp"
#include "qscissors/nla.hpp"

#include <vector>

namespace qscissors {

/// Teleportation-based error-correction box: TMSV(mu) input (A, In), TMSV(mu_res) resource
/// (R, R'), loss on R', N-scissor amplifier on R', dual homodyne on (In, R), displacement on A and B.
struct EcBoxConfig {
  double mu = 0.33;
  double mu_res = 0.33;
  double eta = 0.01;
  int N = 1;               // 0 disables the amplifier (bare teleportation)
  double kappa = 0.5;
  double mu_aux = 0.01;
  double gain_a = 0.0;     // displacement gain on A
  double gain_b = 1.0;     // displacement gain on B; 1 is unit-gain teleportation
  bool exhaustive_patterns = false;

  void validate() const;
};

/// g^2 eta mu_res / (1 + mu_res).
double effective_transmission(const EcBoxConfig& cfg);

struct OutcomeNode {
  double gx;
  double gp;
  double weight;  // quadrature weight including the outcome density
};

struct OutcomeGrid {
  std::vector<OutcomeNode> nodes;
  double coverage;  // outcome probability mass represented by the grid
};

struct ConditionalHerald {
  double gx;
  double gp;
  double density;          // p(gamma)
  double p_succ;           // heralding probability given gamma, renormalised by the source rate
  double density_weight;   // p(gamma) * p_succ
  HeraldResult herald;     // corrected state of (A, B)
};

/// Precomputed conditioning for one configuration.
class EcBox {
 public:
  explicit EcBox(const EcBoxConfig& cfg);

  const EcBoxConfig& config() const { return cfg_; }
  /// Covariance and mean of the dual-homodyne outcome (gx, gp).
  const Eigen::Matrix2d& outcome_cov() const { return outcome_cov_; }
  const Eigen::Vector2d& outcome_mean() const { return outcome_mean_; }
  double outcome_density(double gx, double gp) const;
  /// (mu_aux / (1 + mu_aux))^N.
  double source_rate() const;

  /// Heralded mixture of (A, B) for outcome gamma, without correction.
  /// Its total weight is the raw heralding probability given gamma.
  SignedGaussianMixture conditional_mixture(double gx, double gp) const;
  /// Displacement on (x_A, x_B, p_A, p_B) for unit gain scale.
  Vec correction(double gx, double gp) const;
  ConditionalHerald herald(double gx, double gp) const;

  /// Gauss-Hermite product grid over the outcome distribution. Throws std::invalid_argument
  /// if the grid misses more than the coverage tolerance of probability mass.
  OutcomeGrid hermite_grid(int nodes) const;
  /// Polar Gauss-Legendre grid on the disc |gamma| <= window.
  OutcomeGrid disc_grid(double window, int radial = 16, int angular = 32) const;

 private:
  struct Branch {
    Mat gain;      // conditional mean of the remaining modes = gain * gamma
    HeraldPlan plan;
    double multiplicity;
  };
  EcBoxConfig cfg_;
  Eigen::Matrix2d outcome_cov_;
  Eigen::Vector2d outcome_mean_;
  std::vector<Branch> branches_;
};

ConditionalHerald herald_ecbox(const EcBoxConfig& cfg, double gx, double gp);

/// Per-node moments cached for repeated averaging.
struct EcBoxSamples {
  std::vector<double> grid_weight;
  std::vector<double> weight;  // grid weight * heralding probability
  std::vector<Vec> mean;       // uncorrected mean of (A, B)
  std::vector<Mat> cov;
  std::vector<Vec> shift;      // correction at unit gain scale
  std::vector<SignedGaussianMixture> mixture;
  double p_succ;               // average renormalised heralding probability over the grid
};
EcBoxSamples sample_ecbox(const EcBox& box, const OutcomeGrid& grid);

struct AverageState {
  Vec mean;
  Mat cov;
  double p_succ;
};

/// Moments of the outcome-averaged corrected state, via the law of total covariance.
AverageState q1_average_state(const EcBoxSamples& s, double gain_scale = 1.0);
/// Same quantity from one pooled signed mixture over all nodes.
AverageState q1_average_state_pooled(const EcBoxSamples& s, double gain_scale = 1.0);

enum class Measure { geof, rci };
double apply_measure(Measure m, const Mat& cov);

/// Outcome average of a measure of the conditional states.
double q2_average_measure(const EcBoxSamples& s, Measure m);

struct GainOptimum {
  double scale;
  double value;
};
/// Best common scale of (gain_a, gain_b) for the measure of the averaged state.
GainOptimum optimize_q1_gain(const EcBoxSamples& s, Measure m, double max_scale = 2.0);

}  // namespace qscissors
