#pragma once

#include "qscissors/harness/records.hpp"

#include <optional>

namespace qscissors::harness {

struct ParetoPoint {
  double p_succ;
  double best_rci;
  double arg_mu;
  double arg_kappa;
};

/// Log-uniform samples of (mu, kappa); the same seed gives the same sequence on every platform.
std::vector<std::pair<double, double>> pareto_samples(const Domain& d, int count, std::uint64_t seed);

/// Upper-left staircase: for each retained point no sample has both higher p_succ and higher rci.
/// Sorted by increasing p_succ, so best_rci is non-increasing along the sequence.
std::vector<ParetoPoint> pareto_envelope(const std::vector<SweepRecord>& records);

/// Best rci reachable with success probability at least p (NaN past the envelope's reach).
double envelope_at(const std::vector<ParetoPoint>& env, double p);

struct Crossover {
  double p_lo;  // largest p where the first envelope still lies above
  double p_hi;  // smallest p where it lies below
};
/// Where envelope a stops dominating envelope b, scanning p upwards over both envelopes' knots.
std::optional<Crossover> envelope_crossover(const std::vector<ParetoPoint>& a, const std::vector<ParetoPoint>& b);

struct ParetoRun {
  std::vector<int> Ns;
  std::vector<std::vector<SweepRecord>> samples;
  std::vector<std::vector<ParetoPoint>> envelopes;
  std::size_t failures = 0;
  double runtime_s = 0.0;
};
ParetoRun run_pareto(const ParetoConfig& c);

std::vector<std::string> pareto_columns();
Json pareto_summary(const ParetoConfig& c, const ParetoRun& run);

}  // namespace qscissors::harness
