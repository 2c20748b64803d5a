#include "qscissors/harness/ecbox_run.hpp"

#include "qscissors/ecbox.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

namespace qscissors::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double direct_eof(double mu, double eta) {
  GaussianState s = pure_loss(tmsv(mu), eta, 1);
  return geof_two_mode(BipartiteCov(s.cov()));
}

}  // namespace

EcBoxRecord evaluate_ecbox(const EcBoxRunConfig& c, int N, double mu, double mu_res, double g) {
  EcBoxConfig cfg;
  cfg.mu = mu;
  cfg.mu_res = mu_res;
  cfg.eta = c.eta;
  cfg.N = N;
  cfg.kappa = N > 0 ? ScissorsConfig::kappa_from_gain(g) : 0.5;
  cfg.mu_aux = c.mu_aux;
  cfg.gain_a = c.gain_a;
  cfg.gain_b = c.gain_b;

  EcBoxRecord r;
  r.N = N;
  r.mu = mu;
  r.mu_res = mu_res;
  r.g = N > 0 ? g : 1.0;
  r.kappa = cfg.kappa;
  r.eta = c.eta;
  r.eta_effec = effective_transmission(cfg);
  r.eof_direct = direct_eof(mu, c.eta);

  EcBox box(cfg);
  EcBoxSamples s = sample_ecbox(box, box.hermite_grid(c.nodes));
  r.p_succ = s.p_succ;
  const AverageState avg = q1_average_state(s);
  r.q1_geof = c.q1 ? apply_measure(Measure::geof, avg.cov) : kNaN;
  r.q1_rci = c.q1 ? apply_measure(Measure::rci, avg.cov) : kNaN;
  r.q2_geof = c.q2_geof ? q2_average_measure(s, Measure::geof) : kNaN;
  r.q2_rci = c.q2_rci ? q2_average_measure(s, Measure::rci) : kNaN;
  if (c.optimize_gain && c.q1) {
    GainOptimum opt = optimize_q1_gain(s, Measure::geof);
    r.q1_geof_opt = opt.value;
    r.gain_scale_opt = opt.scale;
  } else {
    r.q1_geof_opt = kNaN;
    r.gain_scale_opt = kNaN;
  }

  r.window = c.window;
  if (c.window > 0.0) {
    OutcomeGrid disc = box.disc_grid(c.window);
    EcBoxSamples w = sample_ecbox(box, disc);
    r.window_mass = disc.coverage;
    r.window_p_succ = w.p_succ;
    r.window_q1_rci = apply_measure(Measure::rci, q1_average_state(w).cov);
    r.window_q2_rci = q2_average_measure(w, Measure::rci);
  } else {
    r.window_mass = kNaN;
    r.window_p_succ = kNaN;
    r.window_q1_rci = kNaN;
    r.window_q2_rci = kNaN;
  }
  return r;
}

EcBoxRun run_ecbox(const EcBoxRunConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  struct Job {
    int N;
    double mu, mu_res, g;
  };
  std::vector<Job> jobs;
  for (int n : c.Ns) {
    for (std::size_t i = 0; i < c.mus.size(); ++i) {
      const double mu = c.mus[i];
      const double mu_res = c.mu_res.empty() ? mu : c.mu_res[std::min(i, c.mu_res.size() - 1)];
      if (n == 0) {
        jobs.push_back({0, mu, mu_res, 1.0});
        continue;
      }
      for (double g : c.gains) jobs.push_back({n, mu, mu_res, g});
    }
  }
  EcBoxRun run;
  run.total = jobs.size();
  std::vector<std::optional<EcBoxRecord>> out(jobs.size());
  std::vector<std::string> reasons(jobs.size());
  parallel_for(jobs.size(), c.run.threads, [&](std::size_t i) {
    const Job& j = jobs[i];
    try {
      out[i] = evaluate_ecbox(c, j.N, j.mu, j.mu_res, j.g);
    } catch (const std::exception& e) {
      reasons[i] = fmt::format("N={}, mu={}, mu_res={}, g={}: {}", j.N, j.mu, j.mu_res, j.g, e.what());
    }
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (out[i]) run.records.push_back(*out[i]);
    else run.failures.push_back(reasons[i]);
  }
  run.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

std::vector<std::string> ecbox_columns() {
  return {"N", "mu", "mu_res", "g", "g2", "kappa", "eta", "eta_effec", "p_succ", "q1_geof", "q2_geof",
          "q1_rci", "q2_rci", "q1_geof_opt", "gain_scale_opt", "window", "window_mass", "window_p_succ",
          "window_q1_rci", "window_q2_rci", "eof_direct"};
}

std::string format_ecbox(const EcBoxRecord& r) {
  return csv_line({std::to_string(r.N), format_double(r.mu), format_double(r.mu_res), format_double(r.g),
                   format_double(r.g * r.g), format_double(r.kappa), format_double(r.eta),
                   format_double(r.eta_effec), format_double(r.p_succ), format_double(r.q1_geof),
                   format_double(r.q2_geof), format_double(r.q1_rci), format_double(r.q2_rci),
                   format_double(r.q1_geof_opt), format_double(r.gain_scale_opt), format_double(r.window),
                   format_double(r.window_mass), format_double(r.window_p_succ), format_double(r.window_q1_rci),
                   format_double(r.window_q2_rci), format_double(r.eof_direct)});
}

Json ecbox_summary(const EcBoxRunConfig& c, const EcBoxRun& run) {
  RunSummary s;
  s.command = "ecbox";
  s.config_hash = config_hash(to_json(c));
  s.runtime_s = run.runtime_s;
  s.points = run.total;
  s.failures = run.failures.size();
  s.max = -std::numeric_limits<double>::infinity();
  std::size_t order_violations = 0;
  for (const auto& r : run.records) {
    if (!std::isnan(r.q2_geof) && r.q2_geof > s.max) {
      s.max = r.q2_geof;
      s.argmax = {{"N", r.N}, {"mu", r.mu}, {"mu_res", r.mu_res}, {"g", r.g}};
    }
    if (!std::isnan(r.q1_geof) && !std::isnan(r.q2_geof) && r.q2_geof < r.q1_geof) ++order_violations;
  }
  s.extra["maximised"] = "q2_geof";
  s.extra["q2_below_q1_rows"] = order_violations;
  Json fails = Json::array();
  for (const auto& f : run.failures) fails.push_back(f);
  s.extra["failed_points"] = fails;
  return to_json(s);
}

}  // namespace qscissors::harness
