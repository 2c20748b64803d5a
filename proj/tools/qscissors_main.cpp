// qscissors: sweeps, optimisation, Pareto envelopes and figure recipes for the
// scissors-amplified lossy channel.

#include "qscissors/harness/oracle_check.hpp"
#include "qscissors/harness/repro.hpp"
#include "qscissors/tolerances.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <chrono>
#include <iostream>

using namespace qscissors::harness;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kValidity = 3 };

struct Common {
  std::string config;
  std::string out;
  std::string summary;
  int threads = -1;
};

void add_common(CLI::App* app, Common& c, bool config_required = true) {
  auto* opt = app->add_option("-c,--config", c.config, "JSON configuration file");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  else opt->check(CLI::ExistingFile);
  app->add_option("-o,--out", c.out, "CSV output path")->required();
  app->add_option("--summary", c.summary, "JSON summary path (default: next to the CSV)");
  app->add_option("-j,--threads", c.threads, "worker threads, 0 for all cores (overrides the config)");
}

std::string summary_for(const Common& c) { return c.summary.empty() ? summary_path(c.out) : c.summary; }

int verdict(std::size_t failures, std::size_t points, double max_fraction) {
  if (points == 0) return kOk;
  const double f = static_cast<double>(failures) / static_cast<double>(points);
  if (f > max_fraction) {
    std::cerr << fmt::format("error: {} of {} points failed ({:.3g} > allowed {:.3g})\n", failures, points, f,
                             max_fraction);
    return kValidity;
  }
  return kOk;
}

int cmd_sweep(const Common& c, bool resume) {
  SweepConfig cfg = parse_sweep(load_json_file(c.config));
  if (c.threads >= 0) cfg.run.threads = c.threads;
  SweepOutcome out = run_sweep(cfg, c.out, resume, &std::cerr);
  write_json(summary_for(c), sweep_summary(cfg, out));
  if (auto best = out.best_rci()) {
    std::cout << fmt::format("{} records ({} resumed), max rci {:.6g} at eta={} N={} mu={:.6g} kappa={:.6g}\n",
                             out.records.size(), out.resumed, best->rci, best->eta, best->N, best->mu, best->kappa);
  }
  return verdict(out.total - out.records.size(), out.total, cfg.run.max_failure_fraction);
}

int cmd_optimize(const Common& c) {
  OptimizeConfig cfg = parse_optimize(load_json_file(c.config));
  if (c.threads >= 0) cfg.run.threads = c.threads;
  const auto start = std::chrono::steady_clock::now();
  auto res = run_optimize(cfg);
  const double rt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CsvWriter w(c.out, optimize_columns());
  std::size_t failures = 0;
  for (const auto& r : res) {
    w.write(format_optimum(r));
    failures += r.failures;
    std::cout << fmt::format("eta={} N={}: {} {:.6g} at mu={:.6g} kappa={:.6g}{}\n", r.eta, r.N,
                             objective_name(r.objective), objective_value(r.best, r.objective), r.best.mu,
                             r.best.kappa, r.converged ? "" : " (not converged, best so far)");
  }
  write_json(summary_for(c), optimize_summary(cfg, res, rt));
  return verdict(failures, res.size() * cfg.coarse * cfg.coarse, cfg.run.max_failure_fraction);
}

int cmd_pareto(const Common& c, const std::string& samples_out) {
  ParetoConfig cfg = parse_pareto(load_json_file(c.config));
  if (c.threads >= 0) cfg.run.threads = c.threads;
  ParetoRun run = run_pareto(cfg);
  CsvWriter w(c.out, pareto_columns());
  for (std::size_t k = 0; k < run.Ns.size(); ++k) {
    for (const auto& e : run.envelopes[k]) {
      w.write(csv_line({std::to_string(run.Ns[k]), format_double(e.p_succ), format_double(e.best_rci),
                        format_double(e.arg_mu), format_double(e.arg_kappa)}));
    }
    std::cout << fmt::format("N={}: {} envelope points\n", run.Ns[k], run.envelopes[k].size());
  }
  if (!samples_out.empty()) {
    CsvWriter s(samples_out, sweep_columns(false));
    for (const auto& recs : run.samples) {
      for (const auto& r : recs) s.write(format_record(r, false));
    }
  }
  write_json(summary_for(c), pareto_summary(cfg, run));
  return verdict(run.failures, cfg.samples * cfg.Ns.size(), cfg.run.max_failure_fraction);
}

int cmd_ecbox(const Common& c) {
  EcBoxRunConfig cfg = parse_ecbox(load_json_file(c.config));
  if (c.threads >= 0) cfg.run.threads = c.threads;
  EcBoxRun run = run_ecbox(cfg);
  CsvWriter w(c.out, ecbox_columns());
  for (const auto& r : run.records) w.write(format_ecbox(r));
  for (const auto& f : run.failures) std::cerr << "skipped " << f << '\n';
  write_json(summary_for(c), ecbox_summary(cfg, run));
  std::cout << fmt::format("{} of {} EC-box points evaluated\n", run.records.size(), run.total);
  return verdict(run.failures.size(), run.total, cfg.run.max_failure_fraction);
}

int cmd_oracle(const Common& c, int cutoff) {
  OracleCheckConfig cfg = c.config.empty() ? OracleCheckConfig{} : parse_oracle_check(load_json_file(c.config));
  if (c.threads >= 0) cfg.run.threads = c.threads;
  if (cutoff > 0) cfg.cutoff = cutoff;
  OracleCheckRun run = run_oracle_check(cfg);
  CsvWriter w(c.out, oracle_columns());
  for (const auto& r : run.rows) w.write(format_oracle(r));
  for (const auto& f : run.failures) std::cerr << "failed " << f << '\n';
  write_json(summary_for(c), oracle_summary(cfg, run));
  std::cout << fmt::format("{} of {} points agree within {:g}\n", run.rows.size() + run.failures.size() -
                           run.disagreements(), run.rows.size() + run.failures.size(), cfg.tolerance);
  return run.disagreements() > 0 ? kValidity : kOk;
}

int cmd_repro(const std::string& figure, const ReproOptions& o) {
  std::vector<std::string> figures = figure == "all" ? repro_figures() : std::vector<std::string>{figure};
  int code = kOk;
  for (const auto& f : figures) {
    ReproResult r = run_repro(f, o);
    for (const auto& ch : r.checks) {
      std::cout << fmt::format("{} {}: {} = {:.10g} (need {} {:g})\n", ch.pass ? "PASS" : "FAIL", f, ch.name,
                               ch.value, ch.relation, ch.threshold);
    }
    std::cout << fmt::format("{}: {:.1f} s, files: {}\n", f, r.runtime_s, fmt::join(r.files, " "));
    if (r.validity_exceeded) {
      std::cerr << fmt::format("error: {}: {} of {} points failed\n", f, r.failures, r.points);
      code = kValidity;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scissors-amplified lossy channel simulator"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  Common sweep_opts, opt_opts, pareto_opts, ecbox_opts, oracle_opts;
  bool resume = false;
  std::string samples_out;
  int cutoff = 0;
  std::string figure;
  ReproOptions repro;

  auto* sweep = app.add_subcommand("sweep", "evaluate a (eta, N, mu, kappa) grid");
  add_common(sweep, sweep_opts);
  sweep->add_flag("--resume", resume, "continue an interrupted run writing to the same CSV");

  auto* optimize = app.add_subcommand("optimize", "maximise rci or rci * p_succ over (mu, kappa)");
  add_common(optimize, opt_opts);

  auto* pareto = app.add_subcommand("pareto", "sample (mu, kappa) and extract the (p_succ, rci) envelope");
  add_common(pareto, pareto_opts);
  pareto->add_option("--samples-out", samples_out, "CSV of every sampled point");

  auto* ecbox = app.add_subcommand("ecbox", "teleportation error-correction box over a gain grid");
  add_common(ecbox, ecbox_opts);

  auto* oracle = app.add_subcommand("oracle-check", "compare the Gaussian herald with a truncated Fock simulation");
  add_common(oracle, oracle_opts, false);
  oracle->add_option("--cutoff", cutoff, "Fock cutoff (overrides the config)");

  auto* rep = app.add_subcommand("repro", "run a figure recipe");
  std::vector<std::string> choices = repro_figures();
  choices.push_back("all");
  rep->add_option("figure", figure, "figure id")->required()->check(CLI::IsMember(choices));
  rep->add_option("-o,--out-dir", repro.out_dir, "output directory");
  rep->add_option("-j,--threads", repro.threads, "worker threads, 0 for all cores");
  rep->add_flag("--quick", repro.quick, "coarse grids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*sweep) return cmd_sweep(sweep_opts, resume);
    if (*optimize) return cmd_optimize(opt_opts);
    if (*pareto) return cmd_pareto(pareto_opts, samples_out);
    if (*ecbox) return cmd_ecbox(ecbox_opts);
    if (*oracle) return cmd_oracle(oracle_opts, cutoff);
    if (*rep) return cmd_repro(figure, repro);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const qscissors::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kValidity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
