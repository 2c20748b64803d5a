#include "qscissors/harness/pareto.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace qscissors::harness {

std::vector<std::pair<double, double>> pareto_samples(const Domain& d, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double lm0 = std::log10(d.mu_min), lm1 = std::log10(d.mu_max);
  const double lk0 = std::log10(d.kappa_min), lk1 = std::log10(d.kappa_max);
  std::vector<std::pair<double, double>> s(static_cast<std::size_t>(count));
  for (auto& [mu, kappa] : s) {
    mu = std::pow(10.0, lm0 + (lm1 - lm0) * unit());
    kappa = std::pow(10.0, lk0 + (lk1 - lk0) * unit());
  }
  return s;
}

std::vector<ParetoPoint> pareto_envelope(const std::vector<SweepRecord>& records) {
  std::vector<const SweepRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const SweepRecord* a, const SweepRecord* b) {
    if (a->p_succ != b->p_succ) return a->p_succ > b->p_succ;
    return a->rci > b->rci;
  });
  std::vector<ParetoPoint> env;
  double best = -std::numeric_limits<double>::infinity();
  for (const SweepRecord* r : sorted) {
    if (r->rci > best) {
      best = r->rci;
      env.push_back({r->p_succ, r->rci, r->mu, r->kappa});
    }
  }
  std::reverse(env.begin(), env.end());
  return env;
}

double envelope_at(const std::vector<ParetoPoint>& env, double p) {
  auto it = std::lower_bound(env.begin(), env.end(), p,
                             [](const ParetoPoint& e, double v) { return e.p_succ < v; });
  if (it == env.end()) return std::numeric_limits<double>::quiet_NaN();
  return it->best_rci;
}

std::optional<Crossover> envelope_crossover(const std::vector<ParetoPoint>& a, const std::vector<ParetoPoint>& b) {
  std::vector<double> knots;
  for (const auto& e : a) knots.push_back(e.p_succ);
  for (const auto& e : b) knots.push_back(e.p_succ);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  std::optional<double> last_above;
  for (double p : knots) {
    const double va = envelope_at(a, p), vb = envelope_at(b, p);
    const double ra = std::isnan(va) ? -std::numeric_limits<double>::infinity() : va;
    const double rb = std::isnan(vb) ? -std::numeric_limits<double>::infinity() : vb;
    if (ra > rb) {
      last_above = p;
    } else if (last_above) {
      return Crossover{*last_above, p};
    }
  }
  return std::nullopt;
}

ParetoRun run_pareto(const ParetoConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  ParetoRun run;
  run.Ns = c.Ns;
  const auto pts = pareto_samples(c.domain, c.samples, c.seed);
  for (int n : c.Ns) {
    std::vector<std::optional<SweepRecord>> out(pts.size());
    parallel_for(pts.size(), c.run.threads, [&](std::size_t i) {
      try {
        out[i] = evaluate_point(c.eta, n, pts[i].first, pts[i].second, c.mu_aux, false);
        out[i]->grid_index = i;
      } catch (const std::exception&) {
      }
    });
    std::vector<SweepRecord> recs;
    for (auto& r : out) {
      if (r) recs.push_back(*r);
      else ++run.failures;
    }
    run.envelopes.push_back(pareto_envelope(recs));
    run.samples.push_back(std::move(recs));
  }
  run.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

std::vector<std::string> pareto_columns() { return {"N", "p_succ", "best_rci", "arg_mu", "arg_kappa"}; }

Json pareto_summary(const ParetoConfig& c, const ParetoRun& run) {
  RunSummary s;
  s.command = "pareto";
  s.config_hash = config_hash(to_json(c));
  s.runtime_s = run.runtime_s;
  s.points = c.samples * c.Ns.size();
  s.failures = run.failures;
  s.max = -std::numeric_limits<double>::infinity();
  Json per = Json::array();
  for (std::size_t k = 0; k < run.Ns.size(); ++k) {
    const auto& env = run.envelopes[k];
    if (env.empty()) continue;
    const ParetoPoint& top = env.front();
    if (top.best_rci > s.max) {
      s.max = top.best_rci;
      s.argmax = {{"N", run.Ns[k]}, {"mu", top.arg_mu}, {"kappa", top.arg_kappa}, {"p_succ", top.p_succ}};
    }
    per.push_back({{"N", run.Ns[k]}, {"envelope_points", env.size()}, {"max_rci", top.best_rci},
                   {"max_p_succ", env.back().p_succ}});
  }
  s.extra["envelopes"] = per;
  Json cross = Json::array();
  for (std::size_t i = 0; i < run.Ns.size(); ++i) {
    for (std::size_t j = 0; j < run.Ns.size(); ++j) {
      if (run.Ns[i] <= run.Ns[j]) continue;
      auto x = envelope_crossover(run.envelopes[i], run.envelopes[j]);
      Json e = {{"upper_N", run.Ns[i]}, {"lower_N", run.Ns[j]}};
      if (x) {
        e["above_until_p_succ"] = x->p_lo;
        e["below_from_p_succ"] = x->p_hi;
      } else {
        e["above_until_p_succ"] = nullptr;
        e["below_from_p_succ"] = nullptr;
      }
      cross.push_back(e);
    }
  }
  s.extra["crossovers"] = cross;
  return to_json(s);
}

}  // namespace qscissors::harness
