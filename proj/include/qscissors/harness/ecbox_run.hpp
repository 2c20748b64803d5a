#pragma once

#include "qscissors/harness/records.hpp"

namespace qscissors::harness {

/// One (N, mu, mu_res, g) point of the teleportation box.
struct EcBoxRecord {
  int N = 1;
  double mu = 0.0;
  double mu_res = 0.0;
  double g = 1.0;
  double kappa = 0.5;
  double eta = 0.0;
  double eta_effec = 0.0;
  double p_succ = 0.0;
  double q1_geof = 0.0;   // NaN when disabled
  double q2_geof = 0.0;
  double q1_rci = 0.0;
  double q2_rci = 0.0;
  double q1_geof_opt = 0.0;
  double gain_scale_opt = 0.0;
  double window = 0.0;
  double window_mass = 0.0;
  double window_p_succ = 0.0;
  double window_q1_rci = 0.0;
  double window_q2_rci = 0.0;
  double eof_direct = 0.0;  // GEOF of TMSV(mu) sent straight through the channel
};

EcBoxRecord evaluate_ecbox(const EcBoxRunConfig& c, int N, double mu, double mu_res, double g);

struct EcBoxRun {
  std::vector<EcBoxRecord> records;
  std::vector<std::string> failures;
  std::size_t total = 0;
  double runtime_s = 0.0;
};

/// Evaluates every (N, mu, g) in order; N = 0 rows ignore g and appear once per mu.
EcBoxRun run_ecbox(const EcBoxRunConfig& c);

std::vector<std::string> ecbox_columns();
std::string format_ecbox(const EcBoxRecord& r);
Json ecbox_summary(const EcBoxRunConfig& c, const EcBoxRun& run);

}  // namespace qscissors::harness
