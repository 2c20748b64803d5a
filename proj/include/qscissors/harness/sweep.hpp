#pragma once

#include "qscissors/harness/records.hpp"

#include <iosfwd>
#include <optional>

namespace qscissors::harness {

struct GridPoint {
  double eta;
  int N;
  double mu;
  double kappa;
};

/// Row-major order: eta, then N, then mu, then kappa fastest.
std::vector<GridPoint> sweep_grid(const SweepConfig& c);

struct SweepFailure {
  std::size_t grid_index;
  std::string reason;
};

struct SweepOutcome {
  std::vector<SweepRecord> records;  // every record in the output, including resumed ones
  std::vector<SweepFailure> failures;
  std::size_t total = 0;
  std::size_t resumed = 0;           // records taken over from an earlier partial run
  double runtime_s = 0.0;

  /// Points without a record, relative to the grid size.
  double failure_fraction() const;
  std::optional<SweepRecord> best_rci() const;
};

/// Evaluates the grid, writing rows in grid order as each block completes. With resume set,
/// an existing CSV is truncated to its last complete row and the run continues after it.
/// Skipped points are reported on `log`.
SweepOutcome run_sweep(const SweepConfig& c, const std::string& csv_path, bool resume, std::ostream* log);

Json sweep_summary(const SweepConfig& c, const SweepOutcome& out);

}  // namespace qscissors::harness
