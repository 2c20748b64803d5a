#include "qscissors/harness/repro.hpp"

#include "qscissors/measures.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

namespace qscissors::harness {

namespace {

constexpr double kGeofSlack = 1e-8;      // GEOF bisection accuracy is 1e-9
constexpr double kActivationSlack = 1e-4;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Domain repro_domain() { return Domain{}; }

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& recs) {
  CsvWriter w(path, sweep_columns(false));
  for (const auto& r : recs) w.write(format_record(r, false));
}

void write_optima(const std::string& path, const std::vector<OptimizeResult>& res) {
  CsvWriter w(path, optimize_columns());
  for (const auto& r : res) w.write(format_optimum(r));
}

const OptimizeResult& find(const std::vector<OptimizeResult>& res, double eta, int N) {
  for (const auto& r : res) {
    if (r.eta == eta && r.N == N) return r;
  }
  throw std::logic_error("missing optimum");
}

std::size_t product_violations(const std::vector<SweepRecord>& recs) {
  std::size_t n = 0;
  for (const auto& r : recs) n += r.product < r.c_direct ? 0 : 1;
  return n;
}

void absorb(ReproResult& res, const SweepOutcome& out, double max_fraction) {
  res.points += out.total;
  res.failures += out.total - out.records.size();
  if (out.failure_fraction() > max_fraction) res.validity_exceeded = true;
}

void absorb_optimize(ReproResult& res, const std::vector<OptimizeResult>& opt, int coarse, double max_fraction) {
  for (const auto& r : opt) {
    const std::size_t n = static_cast<std::size_t>(coarse) * coarse;
    res.points += n;
    res.failures += r.failures;
    if (static_cast<double>(r.failures) / n > max_fraction) res.validity_exceeded = true;
  }
}

void surface_recipe(ReproResult& res, const ReproOptions& o, double eta, std::vector<int> Ns) {
  SweepConfig c = repro_surface(eta, std::move(Ns), o.quick);
  c.run.threads = o.threads;
  const std::string path = join(o.out_dir, res.figure + ".csv");
  SweepOutcome out = run_sweep(c, path, false, nullptr);
  res.files.push_back(path);
  absorb(res, out, c.run.max_failure_fraction);
  if (auto best = out.best_rci()) {
    res.max = best->rci;
    res.argmax = {{"eta", best->eta}, {"N", best->N}, {"mu", best->mu}, {"kappa", best->kappa}};
  }
  res.checks.push_back(
      make_check("product_at_or_above_c_direct_points", static_cast<double>(product_violations(out.records)), "==", 0));
}

std::vector<OptimizeResult> optimize_recipe(ReproResult& res, const ReproOptions& o, std::vector<double> etas,
                                            std::vector<int> Ns, Objective obj, const std::string& suffix) {
  OptimizeConfig c = repro_optimize(std::move(etas), std::move(Ns), obj, o.quick);
  c.run.threads = o.threads;
  auto opt = run_optimize(c);
  const std::string path = join(o.out_dir, res.figure + suffix + ".csv");
  write_optima(path, opt);
  res.files.push_back(path);
  absorb_optimize(res, opt, c.coarse, c.run.max_failure_fraction);
  return opt;
}

void fig4a(ReproResult& res, const ReproOptions& o) {
  const double eta = 0.01, cd = direct_capacity(eta);
  SweepConfig c = repro_surface(eta, {1}, o.quick);
  c.run.threads = o.threads;
  const std::string path = join(o.out_dir, "fig4a.csv");
  SweepOutcome out = run_sweep(c, path, false, nullptr);
  res.files.push_back(path);
  absorb(res, out, c.run.max_failure_fraction);
  const double best = out.best_rci() ? out.best_rci()->rci : std::numeric_limits<double>::quiet_NaN();
  if (auto b = out.best_rci()) {
    res.max = b->rci;
    res.argmax = {{"eta", b->eta}, {"N", b->N}, {"mu", b->mu}, {"kappa", b->kappa}};
  }
  res.checks.push_back(make_check("max_rci_over_c_direct", best / cd, ">", 1.5));
  res.checks.push_back(
      make_check("product_at_or_above_c_direct_points", static_cast<double>(product_violations(out.records)), "==", 0));
}

void fig4b(ReproResult& res, const ReproOptions& o) {
  surface_recipe(res, o, 0.01, {2});
  auto opt = optimize_recipe(res, o, {0.01}, {1, 2}, Objective::rci, "_optimum");
  const OptimizeResult& top = find(opt, 0.01, 2);
  const double ratio = top.best.rci / find(opt, 0.01, 1).best.rci;
  res.notes["optimized_rci_N1"] = find(opt, 0.01, 1).best.rci;
  res.notes["optimized_rci_N2"] = top.best.rci;
  res.checks.push_back(make_check("optimized_rci_ratio_N2_over_N1", ratio, ">=", 3.0));
  res.checks.push_back(make_check("optimized_rci_ratio_N2_over_N1", ratio, "<=", 5.0));
}

void fig5(ReproResult& res, const ReproOptions& o) {
  SweepConfig c = repro_surface(0.01, {1, 2}, o.quick);
  c.run.threads = o.threads;
  const std::string path = join(o.out_dir, "fig5.csv");
  SweepOutcome out = run_sweep(c, path, false, nullptr);
  res.files.push_back(path);
  absorb(res, out, c.run.max_failure_fraction);
  std::size_t mismatched = 0;
  res.max = -std::numeric_limits<double>::infinity();
  for (const auto& r : out.records) {
    mismatched += r.product == r.rci * r.p_succ ? 0 : 1;
    if (r.p_succ > res.max) {
      res.max = r.p_succ;
      res.argmax = {{"eta", r.eta}, {"N", r.N}, {"mu", r.mu}, {"kappa", r.kappa}};
    }
  }
  res.checks.push_back(make_check("product_mismatch_points", static_cast<double>(mismatched), "==", 0));
}

void fig6(ReproResult& res, const ReproOptions& o) {
  ParetoConfig pc = repro_pareto(o.quick);
  pc.run.threads = o.threads;
  ParetoRun run = run_pareto(pc);
  res.points += pc.samples * pc.Ns.size();
  res.failures += run.failures;
  if (static_cast<double>(run.failures) / (pc.samples * pc.Ns.size()) > pc.run.max_failure_fraction) {
    res.validity_exceeded = true;
  }
  const std::string env_path = join(o.out_dir, "fig6.csv");
  const std::string scatter_path = join(o.out_dir, "fig6_samples.csv");
  {
    CsvWriter w(env_path, pareto_columns());
    for (std::size_t k = 0; k < run.Ns.size(); ++k) {
      for (const auto& e : run.envelopes[k]) {
        w.write(csv_line({std::to_string(run.Ns[k]), format_double(e.p_succ), format_double(e.best_rci),
                          format_double(e.arg_mu), format_double(e.arg_kappa)}));
      }
    }
    CsvWriter s(scatter_path, sweep_columns(false));
    for (const auto& recs : run.samples) {
      for (const auto& r : recs) s.write(format_record(r, false));
    }
  }
  res.files.push_back(env_path);
  res.files.push_back(scatter_path);

  std::size_t dominated = 0, increasing = 0;
  for (std::size_t k = 0; k < run.Ns.size(); ++k) {
    const auto& env = run.envelopes[k];
    for (std::size_t i = 1; i < env.size(); ++i) increasing += env[i].best_rci > env[i - 1].best_rci ? 1 : 0;
    for (const auto& r : run.samples[k]) {
      const double e = envelope_at(env, r.p_succ);
      if (std::isnan(e) || e < r.rci) ++dominated;
    }
  }
  for (std::size_t k = 0; k < run.Ns.size(); ++k) {
    if (!run.envelopes[k].empty() && run.envelopes[k].front().best_rci > res.max) {
      const ParetoPoint& top = run.envelopes[k].front();
      res.max = top.best_rci;
      res.argmax = {{"eta", pc.eta}, {"N", run.Ns[k]}, {"mu", top.arg_mu}, {"kappa", top.arg_kappa}};
    }
  }
  if (run.Ns.size() == 2) {
    if (auto x = envelope_crossover(run.envelopes[1], run.envelopes[0])) {
      res.notes["N2_above_N1_until_p_succ"] = x->p_lo;
      res.notes["N2_below_N1_from_p_succ"] = x->p_hi;
    }
  }
  res.checks.push_back(make_check("envelope_increasing_steps", static_cast<double>(increasing), "==", 0));
  res.checks.push_back(make_check("samples_above_envelope", static_cast<double>(dominated), "==", 0));

  auto opt = optimize_recipe(res, o, {0.1}, {1, 2}, Objective::rci, "_activation");
  const double cd = direct_capacity(0.1);
  res.checks.push_back(make_check("activation_rci_N1", find(opt, 0.1, 1).best.rci, "<", cd - kActivationSlack));
  res.checks.push_back(make_check("activation_rci_N2", find(opt, 0.1, 2).best.rci, ">", cd + kActivationSlack));
}

std::vector<EcBoxRecord> ecbox_recipe(ReproResult& res, const ReproOptions& o) {
  EcBoxRunConfig c = repro_ecbox(res.figure, o.quick);
  c.run.threads = o.threads;
  EcBoxRun run = run_ecbox(c);
  const std::string path = join(o.out_dir, res.figure + ".csv");
  CsvWriter w(path, ecbox_columns());
  for (const auto& r : run.records) w.write(format_ecbox(r));
  res.files.push_back(path);
  res.points += run.total;
  res.failures += run.failures.size();
  if (static_cast<double>(run.failures.size()) / run.total > c.run.max_failure_fraction) res.validity_exceeded = true;
  return run.records;
}

void fig8(ReproResult& res, const ReproOptions& o) {
  auto recs = ecbox_recipe(res, o);
  std::size_t order = 0;
  double best_n1 = -1.0, benchmark = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : recs) {
    order += r.q2_geof + kGeofSlack >= r.q1_geof ? 0 : 1;
    if (r.N == 1) best_n1 = std::max(best_n1, r.q2_geof);
    if (r.q2_geof > res.max) {
      res.max = r.q2_geof;
      res.argmax = {{"N", r.N}, {"g", r.g}, {"eta_effec", r.eta_effec}};
    }
    benchmark = r.eof_direct;
  }
  std::size_t below = 0;
  for (const auto& a : recs) {
    if (a.N != 2) continue;
    for (const auto& b : recs) {
      if (b.N == 1 && b.g == a.g && b.mu == a.mu && a.q2_geof + kGeofSlack < b.q2_geof) ++below;
    }
  }
  res.checks.push_back(make_check("rows_with_q2_below_q1", static_cast<double>(order), "==", 0));
  res.checks.push_back(make_check("max_q2_geof_N1_over_direct_eof", best_n1 / benchmark, ">", 1.0));
  res.checks.push_back(make_check("g_points_with_N2_q2_below_N1", static_cast<double>(below), "==", 0));
}

void fig9(ReproResult& res, const ReproOptions& o) {
  auto recs = ecbox_recipe(res, o);
  std::size_t bad = 0;
  for (const auto& r : recs) {
    bad += std::isfinite(r.p_succ) && r.p_succ > 0.0 ? 0 : 1;
    if (r.p_succ > res.max) {
      res.max = r.p_succ;
      res.argmax = {{"N", r.N}, {"g", r.g}, {"eta_effec", r.eta_effec}};
    }
  }
  res.checks.push_back(make_check("rows_without_positive_p_succ", static_cast<double>(bad), "==", 0));
}

void fig10(ReproResult& res, const ReproOptions& o) {
  auto recs = ecbox_recipe(res, o);
  std::size_t order = 0, mass = 0;
  for (const auto& r : recs) {
    order += r.q2_geof + kGeofSlack >= r.q1_geof ? 0 : 1;
    mass += r.window_mass > 0.0 && r.window_mass <= 1.0 ? 0 : 1;
    if (r.window_q2_rci > res.max) {
      res.max = r.window_q2_rci;
      res.argmax = {{"N", r.N}, {"g", r.g}, {"eta_effec", r.eta_effec}};
    }
  }
  res.checks.push_back(make_check("rows_with_q2_below_q1", static_cast<double>(order), "==", 0));
  res.checks.push_back(make_check("rows_with_window_mass_outside_unit", static_cast<double>(mass), "==", 0));
}

void fig11(ReproResult& res, const ReproOptions& o) {
  const std::vector<double> etas = o.quick ? log_space(0.01, 0.3, 3) : log_space(1e-3, 0.5, 12);
  auto opt = optimize_recipe(res, o, etas, {1, 2}, Objective::product, "");
  std::size_t above = 0;
  double worst = 0.0;
  for (const auto& r : opt) {
    above += r.best.product < r.best.c_direct ? 0 : 1;
    worst = std::max(worst, r.best.product / r.best.c_direct);
    if (r.best.product > res.max) {
      res.max = r.best.product;
      res.argmax = {{"eta", r.eta}, {"N", r.N}, {"mu", r.best.mu}, {"kappa", r.best.kappa}};
    }
  }
  res.checks.push_back(make_check("optimized_product_at_or_above_c_direct", static_cast<double>(above), "==", 0));
  res.checks.push_back(make_check("max_product_over_c_direct", worst, "<", 1.0));
}

}  // namespace

bool ReproResult::all_checks_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

ReproCheck make_check(std::string name, double value, std::string relation, double threshold) {
  bool pass = false;
  if (relation == "<") pass = value < threshold;
  else if (relation == "<=") pass = value <= threshold;
  else if (relation == ">") pass = value > threshold;
  else if (relation == ">=") pass = value >= threshold;
  else if (relation == "==") pass = value == threshold;
  else throw std::invalid_argument("unknown relation " + relation);
  return {std::move(name), value, std::move(relation), threshold, pass};
}

const std::vector<std::string>& repro_figures() {
  static const std::vector<std::string> ids = {"fig4a", "fig4b", "fig5", "fig6", "fig8", "fig9", "fig10", "fig11"};
  return ids;
}

SweepConfig repro_surface(double eta, std::vector<int> Ns, bool quick) {
  const Domain d = repro_domain();
  const int n = quick ? 8 : 40;
  SweepConfig c;
  c.etas = {eta};
  c.Ns = std::move(Ns);
  c.mus = log_space(d.mu_min, d.mu_max, n);
  c.kappas = log_space(d.kappa_min, d.kappa_max, n);
  return c;
}

OptimizeConfig repro_optimize(std::vector<double> etas, std::vector<int> Ns, Objective o, bool quick) {
  OptimizeConfig c;
  c.etas = std::move(etas);
  c.Ns = std::move(Ns);
  c.objective = o;
  c.domain = repro_domain();
  c.coarse = quick ? 8 : 16;
  c.starts = quick ? 2 : 5;
  return c;
}

ParetoConfig repro_pareto(bool quick) {
  ParetoConfig c;
  c.eta = 0.01;
  c.Ns = {1, 2};
  c.samples = quick ? 200 : 4000;
  c.domain = repro_domain();
  return c;
}

EcBoxRunConfig repro_ecbox(const std::string& figure, bool quick) {
  EcBoxRunConfig c;
  c.eta = 0.01;
  c.mus = {0.33};
  c.mu_res = {0.33};
  c.Ns = {0, 1, 2};
  c.gains = quick ? std::vector<double>{2.0, 6.0} : std::vector<double>{1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0};
  c.nodes = 21;
  if (figure == "fig9") {
    c.q1 = false;
    c.q2_geof = false;
    c.q2_rci = false;
    c.optimize_gain = false;
  } else if (figure == "fig10") {
    c.window = 0.5;
    c.optimize_gain = false;
  }
  return c;
}

ReproResult run_repro(const std::string& figure, const ReproOptions& o) {
  const auto& ids = repro_figures();
  if (std::find(ids.begin(), ids.end(), figure) == ids.end()) {
    throw ConfigError(fmt::format("unknown figure '{}'", figure));
  }
  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory '{}': {}", o.out_dir, ec.message()));

  const auto start = std::chrono::steady_clock::now();
  ReproResult res;
  res.figure = figure;
  if (figure == "fig4a") fig4a(res, o);
  else if (figure == "fig4b") fig4b(res, o);
  else if (figure == "fig5") fig5(res, o);
  else if (figure == "fig6") fig6(res, o);
  else if (figure == "fig8") fig8(res, o);
  else if (figure == "fig9") fig9(res, o);
  else if (figure == "fig10") fig10(res, o);
  else fig11(res, o);
  res.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunSummary s;
  s.command = "repro " + figure;
  s.config_hash = config_hash(Json{{"figure", figure}, {"quick", o.quick}, {"tool_version", tool_version()}});
  s.runtime_s = res.runtime_s;
  s.points = res.points;
  s.failures = res.failures;
  Json checks = Json::array();
  for (const auto& c : res.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"threshold", c.threshold},
                      {"pass", c.pass}});
  }
  s.argmax = res.argmax;
  s.max = res.max;
  s.extra["notes"] = res.notes;
  s.extra["checks"] = checks;
  s.extra["files"] = res.files;
  s.extra["checks_pass"] = res.all_checks_pass();
  const std::string json_path = join(o.out_dir, figure + ".json");
  write_json(json_path, to_json(s));
  res.files.push_back(json_path);
  return res;
}

}  // namespace qscissors::harness
