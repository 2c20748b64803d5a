#pragma once

#include "qscissors/harness/records.hpp"

namespace qscissors::harness {

struct OptimizeResult {
  double eta;
  int N;
  Objective objective;
  SweepRecord best;
  bool converged;        // every simplex refinement met its tolerance
  std::size_t evaluations;
  std::size_t failures;  // coarse points that could not be evaluated
};

double objective_value(const SweepRecord& r, Objective o);
const char* objective_name(Objective o);

/// Coarse log grid over the domain, then Nelder-Mead in (log10 mu, log10 kappa) from the best
/// distinct coarse points.
OptimizeResult optimize_point(double eta, int N, double mu_aux, Objective objective, const Domain& d, int coarse,
                              int starts, int threads);

std::vector<OptimizeResult> run_optimize(const OptimizeConfig& c);

std::vector<std::string> optimize_columns();
std::string format_optimum(const OptimizeResult& r);

Json optimize_summary(const OptimizeConfig& c, const std::vector<OptimizeResult>& results, double runtime_s);

}  // namespace qscissors::harness
