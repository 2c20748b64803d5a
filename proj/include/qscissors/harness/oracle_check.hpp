#pragma once

#include "qscissors/harness/records.hpp"

namespace qscissors::harness {

struct OracleCheckConfig {
  std::vector<double> etas = {0.01, 0.1};
  std::vector<double> mus = {0.05, 0.1, 0.3, 0.5};
  std::vector<double> kappas = {0.3, 0.5, 0.7};
  int N = 1;
  double mu_aux = 0.01;
  int cutoff = 12;
  double tolerance = 1e-4;  // relative; covariance entries are compared on the scale max(|v|, 1)
  RunOptions run;
};

OracleCheckConfig parse_oracle_check(const Json& doc);
Json to_json(const OracleCheckConfig& c);

struct OracleComparison {
  double eta, mu, kappa;
  int N;
  double p_gauss;
  double p_fock;
  double p_rel_err;
  double cov_rel_err;        // worst of the 10 independent entries
  double truncated_mass;
  double top_population;
  bool pass;
  bool tail_flag;            // Fock tail above the truncation tolerance
};

/// Gaussian herald against the truncated-Fock simulation of the same circuit.
/// N = 1 uses the hand-built single-scissor circuit; larger N replays the generic layout.
OracleComparison compare_with_oracle(double eta, int N, double mu, double kappa, double mu_aux, int cutoff,
                                     double tolerance);

struct OracleCheckRun {
  std::vector<OracleComparison> rows;
  std::vector<std::string> failures;
  double runtime_s = 0.0;
  std::size_t disagreements() const;
};
OracleCheckRun run_oracle_check(const OracleCheckConfig& c);

std::vector<std::string> oracle_columns();
std::string format_oracle(const OracleComparison& r);
Json oracle_summary(const OracleCheckConfig& c, const OracleCheckRun& run);

}  // namespace qscissors::harness
