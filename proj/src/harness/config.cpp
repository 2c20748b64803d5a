#include "qscissors/harness/config.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <set>

namespace qscissors::harness {

namespace {

void check_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

double get_number(const Json& j, const std::string& key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(fmt::format("{}.{} must be a number", where, key));
  double v = j[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(fmt::format("{}.{} must be finite", where, key));
  return v;
}

int get_int(const Json& j, const std::string& key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw ConfigError(fmt::format("{}.{} must be an integer", where, key));
  return j[key].get<int>();
}

bool get_bool(const Json& j, const std::string& key, bool fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw ConfigError(fmt::format("{}.{} must be true or false", where, key));
  return j[key].get<bool>();
}

std::vector<double> number_list(const Json& j, const std::string& key, std::vector<double> fallback,
                                const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (v.is_number()) return {v.get<double>()};
  return parse_axis(v, where + "." + key);
}

std::vector<int> int_list(const Json& j, const std::string& key, std::vector<int> fallback,
                          const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ConfigError(fmt::format("{}.{} must hold integers", where, key));
      out.push_back(e.get<int>());
    }
  } else {
    throw ConfigError(fmt::format("{}.{} must be an integer or a list of integers", where, key));
  }
  return out;
}

void check_version(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  if (!doc.contains("schema_version")) throw ConfigError("configuration lacks schema_version");
  if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion) {
    throw ConfigError(fmt::format("unsupported schema_version (this build reads version {})", kSchemaVersion));
  }
}

const Json& section(const Json& doc, const std::string& name) {
  check_version(doc);
  check_keys(doc, "config", {"schema_version", name, "run"});
  if (!doc.contains(name)) throw ConfigError(fmt::format("configuration lacks a '{}' section", name));
  return doc[name];
}

RunOptions parse_run(const Json& doc) {
  RunOptions r;
  if (!doc.contains("run")) return r;
  const Json& j = doc["run"];
  check_keys(j, "run", {"threads", "record_timing", "max_failure_fraction"});
  r.threads = get_int(j, "threads", r.threads, "run");
  r.record_timing = get_bool(j, "record_timing", r.record_timing, "run");
  r.max_failure_fraction = get_number(j, "max_failure_fraction", r.max_failure_fraction, "run");
  if (r.threads < 0) throw ConfigError("run.threads must be >= 0");
  if (!(r.max_failure_fraction >= 0.0 && r.max_failure_fraction <= 1.0)) {
    throw ConfigError("run.max_failure_fraction must lie in [0, 1]");
  }
  return r;
}

Domain parse_domain(const Json& j, const std::string& where) {
  Domain d;
  if (j.contains("mu_range")) {
    const Json& r = j["mu_range"];
    if (!r.is_array() || r.size() != 2) throw ConfigError(fmt::format("{}.mu_range must be [min, max]", where));
    d.mu_min = r[0].get<double>();
    d.mu_max = r[1].get<double>();
  }
  if (j.contains("kappa_range")) {
    const Json& r = j["kappa_range"];
    if (!r.is_array() || r.size() != 2) throw ConfigError(fmt::format("{}.kappa_range must be [min, max]", where));
    d.kappa_min = r[0].get<double>();
    d.kappa_max = r[1].get<double>();
  }
  if (!(d.mu_min > 0.0 && d.mu_max > d.mu_min)) throw ConfigError(fmt::format("{}: need 0 < mu_min < mu_max", where));
  if (!(d.kappa_min > 0.0 && d.kappa_max > d.kappa_min && d.kappa_max < 1.0)) {
    throw ConfigError(fmt::format("{}: need 0 < kappa_min < kappa_max < 1", where));
  }
  return d;
}

void check_physics(const std::vector<double>& etas, const std::vector<int>& Ns, double mu_aux,
                   const std::string& where) {
  if (etas.empty()) throw ConfigError(fmt::format("{}: eta list is empty", where));
  for (double e : etas) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError(fmt::format("{}: eta must lie in (0, 1), got {}", where, e));
  }
  if (Ns.empty()) throw ConfigError(fmt::format("{}: N list is empty", where));
  for (int n : Ns) {
    if (n < 1 || n > 4) throw ConfigError(fmt::format("{}: N must lie in [1, 4], got {}", where, n));
  }
  if (!(mu_aux > 0.0)) throw ConfigError(fmt::format("{}: mu_aux must be positive", where));
}

Json run_json(const RunOptions& r) {
  return {{"threads", r.threads}, {"record_timing", r.record_timing}, {"max_failure_fraction", r.max_failure_fraction}};
}

Json domain_json(const Domain& d) {
  return {{"mu_range", {d.mu_min, d.mu_max}}, {"kappa_range", {d.kappa_min, d.kappa_max}}};
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open configuration file '{}'", path));
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
}

std::vector<double> log_space(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) {
    throw ConfigError(fmt::format("log_space: need 0 < min <= max and count >= 1 (got {}, {}, {})", lo, hi, count));
  }
  std::vector<double> v(static_cast<std::size_t>(count));
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i) v[i] = count == 1 ? lo : std::pow(10.0, a + (b - a) * i / (count - 1));
  if (count > 1) v.back() = hi;
  return v;
}

std::vector<double> lin_space(double lo, double hi, int count) {
  if (count < 1 || !(hi >= lo)) {
    throw ConfigError(fmt::format("lin_space: need min <= max and count >= 1 (got {}, {}, {})", lo, hi, count));
  }
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  if (count > 1) v.back() = hi;
  return v;
}

std::vector<double> parse_axis(const Json& j, const std::string& name) {
  if (j.is_array()) {
    std::vector<double> v;
    for (const auto& e : j) {
      if (!e.is_number()) throw ConfigError(fmt::format("{}: list entries must be numbers", name));
      v.push_back(e.get<double>());
    }
    if (v.empty()) throw ConfigError(fmt::format("{}: empty list", name));
    return v;
  }
  check_keys(j, name, {"min", "max", "count", "spacing"});
  if (!j.contains("min") || !j.contains("max") || !j.contains("count")) {
    throw ConfigError(fmt::format("{}: a range needs min, max and count", name));
  }
  const double lo = get_number(j, "min", 0.0, name);
  const double hi = get_number(j, "max", 0.0, name);
  const int count = get_int(j, "count", 0, name);
  const std::string spacing = j.value("spacing", std::string("linear"));
  if (spacing == "log") return log_space(lo, hi, count);
  if (spacing == "linear") return lin_space(lo, hi, count);
  throw ConfigError(fmt::format("{}: spacing must be 'log' or 'linear', got '{}'", name, spacing));
}

SweepConfig parse_sweep(const Json& doc) {
  const Json& j = section(doc, "sweep");
  check_keys(j, "sweep", {"eta", "N", "mu_aux", "mu", "kappa", "geof"});
  SweepConfig c;
  c.etas = number_list(j, "eta", {}, "sweep");
  c.Ns = int_list(j, "N", {1}, "sweep");
  c.mu_aux = get_number(j, "mu_aux", c.mu_aux, "sweep");
  if (!j.contains("mu") || !j.contains("kappa")) throw ConfigError("sweep: mu and kappa axes are required");
  c.mus = parse_axis(j["mu"], "sweep.mu");
  c.kappas = parse_axis(j["kappa"], "sweep.kappa");
  c.geof = get_bool(j, "geof", c.geof, "sweep");
  c.run = parse_run(doc);
  check_physics(c.etas, c.Ns, c.mu_aux, "sweep");
  for (double m : c.mus) {
    if (!(m >= 0.0)) throw ConfigError(fmt::format("sweep: mu must be >= 0, got {}", m));
  }
  for (double k : c.kappas) {
    if (!(k > 0.0 && k < 1.0)) throw ConfigError(fmt::format("sweep: kappa must lie in (0, 1), got {}", k));
  }
  return c;
}

OptimizeConfig parse_optimize(const Json& doc) {
  const Json& j = section(doc, "optimize");
  check_keys(j, "optimize", {"eta", "N", "mu_aux", "objective", "mu_range", "kappa_range", "coarse", "starts"});
  OptimizeConfig c;
  c.etas = number_list(j, "eta", {}, "optimize");
  c.Ns = int_list(j, "N", {1}, "optimize");
  c.mu_aux = get_number(j, "mu_aux", c.mu_aux, "optimize");
  const std::string obj = j.value("objective", std::string("rci"));
  if (obj == "rci") c.objective = Objective::rci;
  else if (obj == "product") c.objective = Objective::product;
  else throw ConfigError(fmt::format("optimize.objective must be 'rci' or 'product', got '{}'", obj));
  c.domain = parse_domain(j, "optimize");
  c.coarse = get_int(j, "coarse", c.coarse, "optimize");
  c.starts = get_int(j, "starts", c.starts, "optimize");
  if (c.coarse < 2 || c.starts < 1) throw ConfigError("optimize: need coarse >= 2 and starts >= 1");
  c.run = parse_run(doc);
  check_physics(c.etas, c.Ns, c.mu_aux, "optimize");
  return c;
}

ParetoConfig parse_pareto(const Json& doc) {
  const Json& j = section(doc, "pareto");
  check_keys(j, "pareto", {"eta", "N", "mu_aux", "samples", "seed", "mu_range", "kappa_range"});
  ParetoConfig c;
  c.eta = get_number(j, "eta", c.eta, "pareto");
  c.Ns = int_list(j, "N", c.Ns, "pareto");
  c.mu_aux = get_number(j, "mu_aux", c.mu_aux, "pareto");
  c.samples = get_int(j, "samples", c.samples, "pareto");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("pareto.seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.domain = parse_domain(j, "pareto");
  if (c.samples < 1) throw ConfigError("pareto.samples must be >= 1");
  c.run = parse_run(doc);
  check_physics({c.eta}, c.Ns, c.mu_aux, "pareto");
  return c;
}

EcBoxRunConfig parse_ecbox(const Json& doc) {
  const Json& j = section(doc, "ecbox");
  check_keys(j, "ecbox", {"eta", "N", "mu", "mu_res", "g", "mu_aux", "gain_a", "gain_b", "nodes",
                          "window", "q1", "q2_geof", "q2_rci", "optimize_gain"});
  EcBoxRunConfig c;
  c.eta = get_number(j, "eta", c.eta, "ecbox");
  c.Ns = int_list(j, "N", c.Ns, "ecbox");
  c.mus = number_list(j, "mu", c.mus, "ecbox");
  c.mu_res = number_list(j, "mu_res", {}, "ecbox");
  c.gains = number_list(j, "g", {}, "ecbox");
  c.mu_aux = get_number(j, "mu_aux", c.mu_aux, "ecbox");
  c.gain_a = get_number(j, "gain_a", c.gain_a, "ecbox");
  c.gain_b = get_number(j, "gain_b", c.gain_b, "ecbox");
  c.nodes = get_int(j, "nodes", c.nodes, "ecbox");
  c.window = get_number(j, "window", c.window, "ecbox");
  c.q1 = get_bool(j, "q1", c.q1, "ecbox");
  c.q2_geof = get_bool(j, "q2_geof", c.q2_geof, "ecbox");
  c.q2_rci = get_bool(j, "q2_rci", c.q2_rci, "ecbox");
  c.optimize_gain = get_bool(j, "optimize_gain", c.optimize_gain, "ecbox");
  c.run = parse_run(doc);
  if (c.gains.empty()) throw ConfigError("ecbox: the amplifier gain list 'g' is required");
  for (double g : c.gains) {
    if (!(g > 0.0)) throw ConfigError(fmt::format("ecbox: g must be positive, got {}", g));
  }
  for (double m : c.mus) {
    if (!(m >= 0.0)) throw ConfigError(fmt::format("ecbox: mu must be >= 0, got {}", m));
  }
  for (double m : c.mu_res) {
    if (!(m >= 0.0)) throw ConfigError(fmt::format("ecbox: mu_res must be >= 0, got {}", m));
  }
  if (c.nodes < 2) throw ConfigError("ecbox.nodes must be >= 2");
  if (!(c.window >= 0.0)) throw ConfigError("ecbox.window must be >= 0");
  if (!(c.eta > 0.0 && c.eta <= 1.0)) throw ConfigError("ecbox.eta must lie in (0, 1]");
  for (int n : c.Ns) {
    if (n < 0 || n > 3) throw ConfigError(fmt::format("ecbox: N must lie in [0, 3], got {}", n));
  }
  if (!(c.mu_aux > 0.0)) throw ConfigError("ecbox.mu_aux must be positive");
  return c;
}

Json to_json(const SweepConfig& c) {
  return {{"schema_version", kSchemaVersion},
          {"sweep", {{"eta", c.etas}, {"N", c.Ns}, {"mu_aux", c.mu_aux}, {"mu", c.mus}, {"kappa", c.kappas}, {"geof", c.geof}}},
          {"run", run_json(c.run)}};
}

Json to_json(const OptimizeConfig& c) {
  Json s = domain_json(c.domain);
  s["eta"] = c.etas;
  s["N"] = c.Ns;
  s["mu_aux"] = c.mu_aux;
  s["objective"] = c.objective == Objective::rci ? "rci" : "product";
  s["coarse"] = c.coarse;
  s["starts"] = c.starts;
  return {{"schema_version", kSchemaVersion}, {"optimize", s}, {"run", run_json(c.run)}};
}

Json to_json(const ParetoConfig& c) {
  Json s = domain_json(c.domain);
  s["eta"] = c.eta;
  s["N"] = c.Ns;
  s["mu_aux"] = c.mu_aux;
  s["samples"] = c.samples;
  s["seed"] = c.seed;
  return {{"schema_version", kSchemaVersion}, {"pareto", s}, {"run", run_json(c.run)}};
}

Json to_json(const EcBoxRunConfig& c) {
  Json s = {{"eta", c.eta}, {"N", c.Ns}, {"mu", c.mus}, {"mu_res", c.mu_res}, {"g", c.gains},
            {"mu_aux", c.mu_aux}, {"gain_a", c.gain_a}, {"gain_b", c.gain_b}, {"nodes", c.nodes},
            {"window", c.window}, {"q1", c.q1}, {"q2_geof", c.q2_geof}, {"q2_rci", c.q2_rci},
            {"optimize_gain", c.optimize_gain}};
  return {{"schema_version", kSchemaVersion}, {"ecbox", s}, {"run", run_json(c.run)}};
}

std::string config_hash(const Json& canonical) {
  const std::string text = canonical.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace qscissors::harness
