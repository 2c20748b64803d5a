#include "qscissors/harness/records.hpp"

#include "qscissors/measures.hpp"
#include "qscissors/nla.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

#ifndef QSCISSORS_VERSION
#define QSCISSORS_VERSION "0.0.0"
#endif

namespace qscissors::harness {

std::string tool_version() { return QSCISSORS_VERSION; }

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> sweep_columns(bool timing) {
  std::vector<std::string> c = {"grid_index", "eta", "N", "mu", "kappa", "mu_aux", "rci", "p_succ",
                                "p_succ_prime", "p_succ_valid", "product", "geof", "c_direct"};
  if (timing) c.push_back("timing_s");
  return c;
}

std::string format_record(const SweepRecord& r, bool timing) {
  std::vector<std::string> f = {std::to_string(r.grid_index), format_double(r.eta), std::to_string(r.N),
                                format_double(r.mu), format_double(r.kappa), format_double(r.mu_aux),
                                format_double(r.rci), format_double(r.p_succ), format_double(r.p_succ_prime),
                                r.p_succ_valid ? "1" : "0", format_double(r.product), format_double(r.geof),
                                format_double(r.c_direct)};
  if (timing) f.push_back(format_double(r.timing_s));
  return csv_line(f);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw std::runtime_error(fmt::format("not a number: '{}'", s));
  return v;
}

}  // namespace

SweepRecord parse_record(const std::string& line, bool timing) {
  const auto f = split(line.ends_with('\n') ? line.substr(0, line.size() - 1) : line);
  if (f.size() != sweep_columns(timing).size()) {
    throw std::runtime_error(fmt::format("sweep row has {} fields, expected {}", f.size(), sweep_columns(timing).size()));
  }
  SweepRecord r;
  r.grid_index = std::stoull(f[0]);
  r.eta = to_number(f[1]);
  r.N = std::stoi(f[2]);
  r.mu = to_number(f[3]);
  r.kappa = to_number(f[4]);
  r.mu_aux = to_number(f[5]);
  r.rci = to_number(f[6]);
  r.p_succ = to_number(f[7]);
  r.p_succ_prime = to_number(f[8]);
  r.p_succ_valid = f[9] == "1";
  r.product = to_number(f[10]);
  r.geof = to_number(f[11]);
  r.c_direct = to_number(f[12]);
  if (timing) r.timing_s = to_number(f[13]);
  return r;
}

SweepRecord evaluate_point(double eta, int N, double mu, double kappa, double mu_aux, bool geof) {
  const auto start = std::chrono::steady_clock::now();
  ScissorsConfig cfg{N, kappa, mu_aux, eta, mu};
  NlaHerald h = herald_nla(cfg);
  BipartiteCov v(h.herald.cov);
  SweepRecord r;
  r.eta = eta;
  r.N = N;
  r.mu = mu;
  r.kappa = kappa;
  r.mu_aux = mu_aux;
  r.rci = gaussian_rci(v);
  r.p_succ = h.p_succ;
  r.p_succ_prime = h.p_succ_prime;
  r.p_succ_valid = h.p_succ_valid;
  r.product = r.rci * r.p_succ;
  r.geof = geof ? geof_two_mode(v) : std::numeric_limits<double>::quiet_NaN();
  r.c_direct = direct_capacity(eta);
  if (!std::isfinite(r.rci) || !std::isfinite(r.p_succ)) throw NumericalError("non-finite measure");
  r.timing_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    s += fields[i];
  }
  s += '\n';
  return s;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::runtime_error(fmt::format("CSV has no column '{}'", name));
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header, bool append) {
  out_.open(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out_) throw ConfigError(fmt::format("cannot write '{}'", path));
  if (!append) write(csv_line(header));
}

void CsvWriter::write(const std::string& line) {
  out_ << line;
  out_.flush();
  if (!out_) throw std::runtime_error("write to CSV output failed");
}

Json to_json(const RunSummary& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = s.command;
  j["tool_version"] = tool_version();
  j["config_hash"] = s.config_hash;
  j["runtime_s"] = s.runtime_s;
  j["points"] = s.points;
  j["failures"] = s.failures;
  j["argmax"] = s.argmax;
  j["max"] = s.max;
  for (const auto& [k, v] : s.extra.items()) j[k] = v;
  return j;
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
  out << j.dump(2) << '\n';
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string summary_path(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  const auto slash = csv_path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return csv_path + ".json";
  return csv_path.substr(0, dot) + ".json";
}

}  // namespace qscissors::harness
