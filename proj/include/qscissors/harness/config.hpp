#pragma once

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qscissors::harness {

using Json = nlohmann::json;

/// Invalid or unreadable configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kSchemaVersion = 1;

struct RunOptions {
  int threads = 1;                     // 0 means one per hardware thread
  bool record_timing = false;          // wall time per record; breaks bit-identical reruns
  double max_failure_fraction = 0.1;   // skipped points above this fraction give exit code 3
};

/// Rectangular log-spaced search domain in (mu, kappa).
struct Domain {
  double mu_min = 1e-4;
  double mu_max = 3.0;
  double kappa_min = 1e-5;
  double kappa_max = 0.99;
};

struct SweepConfig {
  std::vector<double> etas;
  std::vector<int> Ns;
  double mu_aux = 0.01;
  std::vector<double> mus;
  std::vector<double> kappas;
  bool geof = false;
  RunOptions run;
};

enum class Objective { rci, product };

struct OptimizeConfig {
  std::vector<double> etas;
  std::vector<int> Ns;
  double mu_aux = 0.01;
  Objective objective = Objective::rci;
  Domain domain;
  int coarse = 16;   // coarse grid points per axis before simplex refinement
  int starts = 5;    // simplex refinements from the best coarse points
  RunOptions run;
};

struct ParetoConfig {
  double eta = 0.01;
  std::vector<int> Ns = {1, 2};
  double mu_aux = 0.01;
  int samples = 4000;
  std::uint64_t seed = 20240611;
  Domain domain;
  RunOptions run;
};

struct EcBoxRunConfig {
  double eta = 0.01;
  std::vector<int> Ns = {1, 2};
  std::vector<double> mus = {0.33};
  std::vector<double> mu_res;   // empty: mu_res = mu
  std::vector<double> gains;    // amplifier gains g; kappa = 1 / (1 + g^2)
  double mu_aux = 0.01;
  double gain_a = 0.0;
  double gain_b = 1.0;
  int nodes = 21;
  double window = 0.0;          // 0 disables the windowed average
  bool q1 = true;
  bool q2_geof = true;
  bool q2_rci = true;
  bool optimize_gain = true;
  RunOptions run;
};

Json load_json_file(const std::string& path);

/// Expands an axis given either as a list or as {"min", "max", "count", "spacing": "log"|"linear"}.
std::vector<double> parse_axis(const Json& j, const std::string& name);

SweepConfig parse_sweep(const Json& j);
OptimizeConfig parse_optimize(const Json& j);
ParetoConfig parse_pareto(const Json& j);
EcBoxRunConfig parse_ecbox(const Json& j);

/// Canonical effective configuration (defaults filled in), used for hashing.
Json to_json(const SweepConfig& c);
Json to_json(const OptimizeConfig& c);
Json to_json(const ParetoConfig& c);
Json to_json(const EcBoxRunConfig& c);

/// SHA-256 of the compact, key-sorted JSON text.
std::string config_hash(const Json& canonical);

std::vector<double> log_space(double lo, double hi, int count);
std::vector<double> lin_space(double lo, double hi, int count);

}  // namespace qscissors::harness
