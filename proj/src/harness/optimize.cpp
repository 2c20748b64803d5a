#include "qscissors/harness/optimize.hpp"

#include "qscissors/numerics.hpp"
#include "qscissors/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace qscissors::harness {

double objective_value(const SweepRecord& r, Objective o) { return o == Objective::rci ? r.rci : r.product; }

const char* objective_name(Objective o) { return o == Objective::rci ? "rci" : "product"; }

OptimizeResult optimize_point(double eta, int N, double mu_aux, Objective objective, const Domain& d, int coarse,
                              int starts, int threads) {
  const double lm0 = std::log10(d.mu_min), lm1 = std::log10(d.mu_max);
  const double lk0 = std::log10(d.kappa_min), lk1 = std::log10(d.kappa_max);
  const auto mus = log_space(d.mu_min, d.mu_max, coarse);
  const auto kappas = log_space(d.kappa_min, d.kappa_max, coarse);

  std::vector<std::optional<SweepRecord>> grid(mus.size() * kappas.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    try {
      grid[i] = evaluate_point(eta, N, mus[i / kappas.size()], kappas[i % kappas.size()], mu_aux, false);
    } catch (const std::exception&) {
    }
  });

  OptimizeResult res{eta, N, objective, {}, true, grid.size(), 0};
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i]) order.push_back(i);
    else ++res.failures;
  }
  if (order.empty()) throw qscissors::NumericalError("optimize: no coarse point could be evaluated");
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return objective_value(*grid[a], objective) > objective_value(*grid[b], objective);
  });
  res.best = *grid[order.front()];

  auto f = [&](const std::vector<double>& x) {
    if (x[0] < lm0 || x[0] > lm1 || x[1] < lk0 || x[1] > lk1) return std::numeric_limits<double>::infinity();
    ++res.evaluations;
    try {
      SweepRecord r = evaluate_point(eta, N, std::pow(10.0, x[0]), std::pow(10.0, x[1]), mu_aux, false);
      if (objective_value(r, objective) > objective_value(res.best, objective)) res.best = r;
      return -objective_value(r, objective);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const double step_m = (lm1 - lm0) / (coarse - 1), step_k = (lk1 - lk0) / (coarse - 1);
  std::vector<std::size_t> chosen;
  for (std::size_t i : order) {
    if (static_cast<int>(chosen.size()) >= starts) break;
    const std::size_t mi = i / kappas.size(), ki = i % kappas.size();
    bool near = false;
    for (std::size_t j : chosen) {
      const std::size_t mj = j / kappas.size(), kj = j % kappas.size();
      if (std::max(mi > mj ? mi - mj : mj - mi, ki > kj ? ki - kj : kj - ki) <= 1) near = true;
    }
    if (near) continue;
    chosen.push_back(i);
    const std::vector<double> x0 = {std::log10(mus[mi]), std::log10(kappas[ki])};
    MinimizeResult m = nelder_mead(f, x0, {0.5 * step_m, 0.5 * step_k}, 1e-6, 2000);
    res.converged = res.converged && m.converged;
  }
  return res;
}

std::vector<OptimizeResult> run_optimize(const OptimizeConfig& c) {
  std::vector<OptimizeResult> out;
  for (double eta : c.etas) {
    for (int n : c.Ns) {
      out.push_back(optimize_point(eta, n, c.mu_aux, c.objective, c.domain, c.coarse, c.starts, c.run.threads));
    }
  }
  return out;
}

std::vector<std::string> optimize_columns() {
  return {"eta", "N", "objective", "mu", "kappa", "mu_aux", "rci", "p_succ", "p_succ_prime", "p_succ_valid",
          "product", "c_direct", "converged", "evaluations"};
}

std::string format_optimum(const OptimizeResult& r) {
  const SweepRecord& b = r.best;
  return csv_line({format_double(r.eta), std::to_string(r.N), objective_name(r.objective), format_double(b.mu),
                   format_double(b.kappa), format_double(b.mu_aux), format_double(b.rci), format_double(b.p_succ),
                   format_double(b.p_succ_prime), b.p_succ_valid ? "1" : "0", format_double(b.product),
                   format_double(b.c_direct), r.converged ? "1" : "0", std::to_string(r.evaluations)});
}

Json optimize_summary(const OptimizeConfig& c, const std::vector<OptimizeResult>& results, double runtime_s) {
  RunSummary s;
  s.command = "optimize";
  s.config_hash = config_hash(to_json(c));
  s.runtime_s = runtime_s;
  s.points = results.size();
  s.max = -std::numeric_limits<double>::infinity();
  Json all = Json::array();
  for (const auto& r : results) {
    s.failures += r.failures;
    const double v = objective_value(r.best, r.objective);
    if (v > s.max) {
      s.max = v;
      s.argmax = {{"eta", r.eta}, {"N", r.N}, {"mu", r.best.mu}, {"kappa", r.best.kappa}};
    }
    all.push_back({{"eta", r.eta}, {"N", r.N}, {"objective", objective_name(r.objective)}, {"value", v},
                   {"mu", r.best.mu}, {"kappa", r.best.kappa}, {"rci", r.best.rci}, {"p_succ", r.best.p_succ},
                   {"c_direct", r.best.c_direct}, {"converged", r.converged}, {"evaluations", r.evaluations}});
  }
  s.extra["optima"] = all;
  return to_json(s);
}

}  // namespace qscissors::harness
