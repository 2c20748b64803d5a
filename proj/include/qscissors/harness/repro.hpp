#pragma once

#include "qscissors/harness/ecbox_run.hpp"
#include "qscissors/harness/optimize.hpp"
#include "qscissors/harness/pareto.hpp"
#include "qscissors/harness/sweep.hpp"

#include <limits>

namespace qscissors::harness {

struct ReproOptions {
  std::string out_dir = ".";
  int threads = 1;
  bool quick = false;  // coarse grids for smoke runs; checks are still evaluated
};

struct ReproCheck {
  std::string name;
  double value;
  std::string relation;  // "<", "<=", ">", ">=", "=="
  double threshold;
  bool pass;
};

struct ReproResult {
  std::string figure;
  std::vector<std::string> files;
  std::vector<ReproCheck> checks;
  std::size_t points = 0;
  std::size_t failures = 0;
  double runtime_s = 0.0;
  Json argmax = Json::object();  // location of the recipe's headline quantity
  double max = -std::numeric_limits<double>::infinity();
  Json notes = Json::object();
  bool validity_exceeded = false;  // skipped points above the failure threshold
  bool all_checks_pass() const;
};

const std::vector<std::string>& repro_figures();

/// Recipe grids, exposed so tests can run the same configurations.
SweepConfig repro_surface(double eta, std::vector<int> Ns, bool quick);
OptimizeConfig repro_optimize(std::vector<double> etas, std::vector<int> Ns, Objective o, bool quick);
ParetoConfig repro_pareto(bool quick);
EcBoxRunConfig repro_ecbox(const std::string& figure, bool quick);

/// Runs a recipe, writing <figure>.csv, side tables and <figure>.json into out_dir.
/// Throws ConfigError for an unknown figure id.
ReproResult run_repro(const std::string& figure, const ReproOptions& o);

ReproCheck make_check(std::string name, double value, std::string relation, double threshold);

}  // namespace qscissors::harness
