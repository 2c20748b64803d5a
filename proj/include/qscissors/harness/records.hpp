#pragma once

#include "qscissors/harness/config.hpp"

#include <atomic>
#include <cstddef>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace qscissors::harness {

std::string tool_version();

/// Shortest text that round-trips: 17 significant digits.
std::string format_double(double v);

/// One evaluated (eta, N, mu, kappa) point of the direct scheme.
struct SweepRecord {
  std::size_t grid_index = 0;
  double eta = 0.0;
  int N = 1;
  double mu = 0.0;
  double kappa = 0.0;
  double mu_aux = 0.0;
  double rci = 0.0;            // Gaussian RCI of the heralded state, ebits
  double p_succ = 0.0;
  double p_succ_prime = 0.0;
  bool p_succ_valid = true;    // false when the renormalised p_succ exceeds 1
  double product = 0.0;        // rci * p_succ
  double geof = 0.0;           // NaN unless requested
  double c_direct = 0.0;
  double timing_s = 0.0;
};

std::vector<std::string> sweep_columns(bool timing);
std::string format_record(const SweepRecord& r, bool timing);
SweepRecord parse_record(const std::string& line, bool timing);

/// Evaluates herald_nla and the measures at one point. Throws on unphysical input.
SweepRecord evaluate_point(double eta, int N, double mu, double kappa, double mu_aux, bool geof);

/// Comma-joined row with LF terminator.
std::string csv_line(const std::vector<std::string>& fields);

/// Reads a CSV written by this tool; returns the header and data rows split on commas.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

/// Single writer. Lines are flushed as they are written so an interrupted run leaves a usable prefix.
class CsvWriter {
 public:
  CsvWriter() = default;
  CsvWriter(const std::string& path, const std::vector<std::string>& header, bool append = false);
  bool is_open() const { return out_.is_open(); }
  void write(const std::string& line);

 private:
  std::ofstream out_;
};

/// Fields common to every run summary; extra holds command-specific results.
struct RunSummary {
  std::string command;
  std::string config_hash;
  double runtime_s = 0.0;
  std::size_t points = 0;
  std::size_t failures = 0;
  Json argmax = Json::object();
  double max = 0.0;
  Json extra = Json::object();
};
Json to_json(const RunSummary& s);
void write_json(const std::string& path, const Json& j);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0: hardware concurrency).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Sidecar path next to a CSV: out.csv -> out.json.
std::string summary_path(const std::string& csv_path);

}  // namespace qscissors::harness
