#include "qscissors/harness/sweep.hpp"

#include "qscissors/tolerances.hpp"

#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <limits>
#include <ostream>

namespace qscissors::harness {

std::vector<GridPoint> sweep_grid(const SweepConfig& c) {
  std::vector<GridPoint> g;
  g.reserve(c.etas.size() * c.Ns.size() * c.mus.size() * c.kappas.size());
  for (double eta : c.etas) {
    for (int n : c.Ns) {
      for (double mu : c.mus) {
        for (double kappa : c.kappas) g.push_back({eta, n, mu, kappa});
      }
    }
  }
  return g;
}

double SweepOutcome::failure_fraction() const {
  if (total == 0) return 0.0;
  return static_cast<double>(total - records.size()) / static_cast<double>(total);
}

std::optional<SweepRecord> SweepOutcome::best_rci() const {
  std::optional<SweepRecord> best;
  for (const auto& r : records) {
    if (!best || r.rci > best->rci) best = r;
  }
  return best;
}

namespace {

/// Keeps the complete rows of an earlier run and returns the index to continue from.
std::size_t recover(const std::string& path, const SweepConfig& c, std::vector<SweepRecord>& kept) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) return 0;
  std::ifstream in(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const auto last_nl = text.rfind('\n');
  if (last_nl == std::string::npos) {
    fs::remove(path);
    return 0;
  }
  text.resize(last_nl + 1);
  std::size_t pos = text.find('\n');
  const std::string header = text.substr(0, pos + 1);
  if (header != csv_line(sweep_columns(c.run.record_timing))) {
    throw ConfigError(fmt::format("cannot resume '{}': its columns differ from this configuration", path));
  }
  std::size_t next = 0;
  while (pos + 1 < text.size()) {
    const auto end = text.find('\n', pos + 1);
    SweepRecord r = parse_record(text.substr(pos + 1, end - pos - 1), c.run.record_timing);
    next = r.grid_index + 1;
    kept.push_back(r);
    pos = end;
  }
  fs::resize_file(path, text.size());
  return next;
}

}  // namespace

SweepOutcome run_sweep(const SweepConfig& c, const std::string& csv_path, bool resume, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  const auto grid = sweep_grid(c);
  SweepOutcome out;
  out.total = grid.size();

  std::size_t first = 0;
  if (resume && !csv_path.empty()) {
    first = recover(csv_path, c, out.records);
    out.resumed = out.records.size();
    if (first > grid.size()) {
      throw ConfigError(fmt::format("cannot resume '{}': it holds rows beyond this grid", csv_path));
    }
  }
  CsvWriter writer;
  if (!csv_path.empty()) {
    const bool append = resume && std::filesystem::exists(csv_path);
    writer = CsvWriter(csv_path, sweep_columns(c.run.record_timing), append);
  }

  const std::size_t block = 256;
  for (std::size_t lo = first; lo < grid.size(); lo += block) {
    const std::size_t hi = std::min(grid.size(), lo + block);
    std::vector<std::optional<SweepRecord>> results(hi - lo);
    std::vector<std::string> reasons(hi - lo);
    parallel_for(hi - lo, c.run.threads, [&](std::size_t k) {
      const GridPoint& p = grid[lo + k];
      try {
        SweepRecord r = evaluate_point(p.eta, p.N, p.mu, p.kappa, c.mu_aux, c.geof);
        r.grid_index = lo + k;
        results[k] = r;
      } catch (const std::exception& e) {
        reasons[k] = e.what();
      }
    });
    for (std::size_t k = 0; k < results.size(); ++k) {
      if (results[k]) {
        if (writer.is_open()) writer.write(format_record(*results[k], c.run.record_timing));
        out.records.push_back(*results[k]);
      } else {
        const GridPoint& p = grid[lo + k];
        out.failures.push_back({lo + k, reasons[k]});
        if (log) {
          *log << fmt::format("skipped point {} (eta={}, N={}, mu={}, kappa={}): {}\n", lo + k, p.eta, p.N, p.mu,
                              p.kappa, reasons[k]);
        }
      }
    }
  }
  out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

Json sweep_summary(const SweepConfig& c, const SweepOutcome& out) {
  RunSummary s;
  s.command = "sweep";
  s.config_hash = config_hash(to_json(c));
  s.runtime_s = out.runtime_s;
  s.points = out.total;
  s.failures = out.total - out.records.size();
  if (auto best = out.best_rci()) {
    s.argmax = {{"grid_index", best->grid_index}, {"eta", best->eta}, {"N", best->N}, {"mu", best->mu},
                {"kappa", best->kappa}};
    s.max = best->rci;
  } else {
    s.max = std::numeric_limits<double>::quiet_NaN();
  }
  Json per = Json::array();
  for (double eta : c.etas) {
    for (int n : c.Ns) {
      const SweepRecord* best = nullptr;
      const SweepRecord* best_product = nullptr;
      std::size_t invalid = 0;
      for (const auto& r : out.records) {
        if (r.eta != eta || r.N != n) continue;
        if (!best || r.rci > best->rci) best = &r;
        if (!best_product || r.product > best_product->product) best_product = &r;
        if (!r.p_succ_valid) ++invalid;
      }
      if (!best) continue;
      per.push_back({{"eta", eta}, {"N", n}, {"max_rci", best->rci}, {"argmax_mu", best->mu},
                     {"argmax_kappa", best->kappa}, {"max_product", best_product->product},
                     {"c_direct", best->c_direct}, {"p_succ_flagged", invalid}});
    }
  }
  s.extra["by_eta_N"] = per;
  s.extra["failure_fraction"] = out.failure_fraction();
  return to_json(s);
}

}  // namespace qscissors::harness
