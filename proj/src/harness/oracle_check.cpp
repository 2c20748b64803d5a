#include "qscissors/harness/oracle_check.hpp"

#include "qscissors/fock.hpp"
#include "qscissors/nla.hpp"
#include "qscissors/tolerances.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <optional>

namespace qscissors::harness {

OracleCheckConfig parse_oracle_check(const Json& doc) {
  if (!doc.is_object() || !doc.contains("schema_version") || doc["schema_version"] != kSchemaVersion) {
    throw ConfigError(fmt::format("configuration needs schema_version {}", kSchemaVersion));
  }
  OracleCheckConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key != "schema_version" && key != "oracle" && key != "run") {
      throw ConfigError(fmt::format("config: unknown key '{}'", key));
    }
  }
  if (doc.contains("run")) {
    const Json& r = doc["run"];
    if (!r.is_object()) throw ConfigError("run: expected an object");
    c.run.threads = r.value("threads", c.run.threads);
  }
  if (!doc.contains("oracle")) return c;
  const Json& j = doc["oracle"];
  if (!j.is_object()) throw ConfigError("oracle: expected an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "eta") c.etas = parse_axis(value, "oracle.eta");
      else if (key == "mu") c.mus = parse_axis(value, "oracle.mu");
      else if (key == "kappa") c.kappas = parse_axis(value, "oracle.kappa");
      else if (key == "N") c.N = value.get<int>();
      else if (key == "mu_aux") c.mu_aux = value.get<double>();
      else if (key == "cutoff") c.cutoff = value.get<int>();
      else if (key == "tolerance") c.tolerance = value.get<double>();
      else throw ConfigError(fmt::format("oracle: unknown key '{}'", key));
    }
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("oracle: {}", e.what()));
  }
  if (c.N < 1 || c.N > 2) throw ConfigError("oracle.N must be 1 or 2");
  if (c.cutoff < 2 || c.cutoff > 40) throw ConfigError("oracle.cutoff must lie in [2, 40]");
  if (!(c.tolerance > 0.0)) throw ConfigError("oracle.tolerance must be positive");
  return c;
}

Json to_json(const OracleCheckConfig& c) {
  return {{"schema_version", kSchemaVersion},
          {"oracle", {{"eta", c.etas}, {"mu", c.mus}, {"kappa", c.kappas}, {"N", c.N}, {"mu_aux", c.mu_aux},
                      {"cutoff", c.cutoff}, {"tolerance", c.tolerance}}},
          {"run", {{"threads", c.run.threads}}}};
}

OracleComparison compare_with_oracle(double eta, int N, double mu, double kappa, double mu_aux, int cutoff,
                                     double tolerance) {
  ScissorsConfig cfg{N, kappa, mu_aux, eta, mu};
  NlaHerald h = herald_nla(cfg);
  OracleResult o = N == 1 ? fock_scissors_oracle(cfg, cutoff) : fock_nla_replay(cfg, cutoff);
  OracleComparison r{eta, mu, kappa, N, h.p_succ_prime, o.probability, 0.0, 0.0, o.truncated_mass,
                     o.top_population, false, false};
  r.p_rel_err = std::abs(h.p_succ_prime - o.probability) / std::abs(o.probability);
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      const double scale = std::max(std::abs(o.cov(i, j)), 1.0);
      r.cov_rel_err = std::max(r.cov_rel_err, std::abs(h.herald.cov(i, j) - o.cov(i, j)) / scale);
    }
  }
  r.pass = r.p_rel_err <= tolerance && r.cov_rel_err <= tolerance;
  r.tail_flag = o.truncated_mass > tol::fock_tail;
  return r;
}

std::size_t OracleCheckRun::disagreements() const {
  std::size_t n = failures.size();
  for (const auto& r : rows) n += r.pass ? 0 : 1;
  return n;
}

OracleCheckRun run_oracle_check(const OracleCheckConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  struct Job {
    double eta, mu, kappa;
  };
  std::vector<Job> jobs;
  for (double eta : c.etas) {
    for (double mu : c.mus) {
      for (double kappa : c.kappas) jobs.push_back({eta, mu, kappa});
    }
  }
  std::vector<std::optional<OracleComparison>> out(jobs.size());
  std::vector<std::string> reasons(jobs.size());
  parallel_for(jobs.size(), c.run.threads, [&](std::size_t i) {
    try {
      out[i] = compare_with_oracle(jobs[i].eta, c.N, jobs[i].mu, jobs[i].kappa, c.mu_aux, c.cutoff, c.tolerance);
    } catch (const std::exception& e) {
      reasons[i] = fmt::format("eta={}, mu={}, kappa={}: {}", jobs[i].eta, jobs[i].mu, jobs[i].kappa, e.what());
    }
  });
  OracleCheckRun run;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (out[i]) run.rows.push_back(*out[i]);
    else run.failures.push_back(reasons[i]);
  }
  run.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

std::vector<std::string> oracle_columns() {
  return {"eta", "N", "mu", "kappa", "p_gauss", "p_fock", "p_rel_err", "cov_rel_err", "truncated_mass",
          "top_population", "pass", "tail_flag"};
}

std::string format_oracle(const OracleComparison& r) {
  return csv_line({format_double(r.eta), std::to_string(r.N), format_double(r.mu), format_double(r.kappa),
                   format_double(r.p_gauss), format_double(r.p_fock), format_double(r.p_rel_err),
                   format_double(r.cov_rel_err), format_double(r.truncated_mass), format_double(r.top_population),
                   r.pass ? "1" : "0", r.tail_flag ? "1" : "0"});
}

Json oracle_summary(const OracleCheckConfig& c, const OracleCheckRun& run) {
  RunSummary s;
  s.command = "oracle-check";
  s.config_hash = config_hash(to_json(c));
  s.runtime_s = run.runtime_s;
  s.points = run.rows.size() + run.failures.size();
  s.failures = run.disagreements();
  double worst = 0.0;
  for (const auto& r : run.rows) {
    const double e = std::max(r.p_rel_err, r.cov_rel_err);
    if (e >= worst) {
      worst = e;
      s.argmax = {{"eta", r.eta}, {"mu", r.mu}, {"kappa", r.kappa}};
    }
  }
  s.max = worst;
  std::size_t flagged = 0;
  for (const auto& r : run.rows) flagged += r.tail_flag ? 1 : 0;
  s.extra["maximised"] = "relative_error";
  s.extra["tolerance"] = c.tolerance;
  s.extra["tail_flagged"] = flagged;
  return to_json(s);
}

}  // namespace qscissors::harness
