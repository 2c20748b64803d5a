#pragma once

#include "qscissors/herald.hpp"

#include <string>
#include <vector>

namespace qscissors {

/// Parameters of the N-scissor amplifier acting on the lossy arm of a TMSV.
struct ScissorsConfig {
  int N = 1;
  double kappa = 0.5;     // transmissivity of the beamsplitter that feeds the auxiliary photon
  double mu_aux = 0.01;   // mean photon number of each auxiliary TMSV
  double eta = 1.0;       // channel transmissivity
  double mu = 0.1;        // mean photon number of the input TMSV

  /// Amplitude gain g = sqrt((1 - kappa) / kappa).
  double gain() const;
  static double kappa_from_gain(double g);
  /// Throws std::invalid_argument for out-of-domain parameters.
  void validate() const;
};

/// Which detector of a scissor fired: the one on the signal side or the one on the auxiliary side.
enum class Click { signal_port, aux_port };

struct CircuitElement {
  enum class Kind { tmsv, loss, beamsplitter, phase_flip };
  Kind kind;
  std::size_t a = 0;
  std::size_t b = 0;
  double value = 0.0;    // mu for tmsv, eta for loss, t for beamsplitter
  bool inverse = false;  // beamsplitter applied as its transpose
};

/// Detector and output modes of one scissor.
struct ScissorPorts {
  std::size_t signal_detector;
  std::size_t aux_detector;
  std::size_t idler_detector;  // heralds the auxiliary photon pair
  std::size_t output;
};

/// Linear-optics circuit acting on initially vacuum modes.
struct CircuitLayout {
  std::size_t num_modes = 0;
  std::vector<std::string> mode_names;
  std::vector<CircuitElement> elements;
  std::vector<ScissorPorts> scissors;
  std::vector<std::size_t> check_ports;  // recombiner ports that must stay dark
  std::size_t idler = 0;                  // retained reference mode A
  std::size_t output = 0;                 // amplified output B

  std::size_t add_mode(std::string name);
  /// Detector pattern for a click assignment; kept = {idler, output}.
  OnOffPattern pattern(const std::vector<Click>& clicks) const;
};

struct NlaStage {
  int N = 1;
  double kappa = 0.5;
  double mu_aux = 0.01;
  /// Apply a pi phase on each scissor output whose auxiliary-side detector fired.
  bool feed_forward = true;
};

/// Appends an N-scissor amplifier to `signal`; new modes go at the end. The layout's output
/// becomes the recombined port.
void append_nla(CircuitLayout& layout, std::size_t signal, const NlaStage& stage,
                const std::vector<Click>& clicks);

/// TMSV(mu) on (A, A'), loss on A', amplifier on A'.
CircuitLayout direct_layout(const ScissorsConfig& cfg, const std::vector<Click>& clicks,
                            bool feed_forward = true);

/// Runs the layout in phase space, starting from vacuum.
GaussianState run_gaussian(const CircuitLayout& layout);

/// Pre-measurement state and layout for one click assignment (default: all signal-side).
std::pair<GaussianState, CircuitLayout> build_premeasurement(const ScissorsConfig& cfg,
                                                             std::vector<Click> clicks = {});

struct NlaOptions {
  /// Enumerate all 2^N click assignments instead of using their symmetry.
  bool exhaustive_patterns = false;
  bool feed_forward = true;
};

struct NlaHerald {
  HeraldResult herald;       // state of (A, B)
  double p_succ_prime;       // probability of any successful click pattern
  double p_succ;             // p_succ_prime / (mu_aux / (1 + mu_aux))^N
  bool p_succ_valid;         // p_succ <= 1
};

/// Every click assignment with a dark check port, summed as one heralded state.
NlaHerald herald_nla(const ScissorsConfig& cfg, const NlaOptions& options = {});

/// Lossy TMSV whose amplitudes equal those of an ideal amplifier of gain g acting on
/// TMSV(mu) after loss eta.
struct EffectiveChannel {
  double mu;
  double eta;
};
EffectiveChannel ideal_nla_equivalent(double mu, double eta, double g);

/// All 2^N click assignments in a fixed order.
std::vector<std::vector<Click>> all_click_patterns(int N);

}  // namespace qscissors
