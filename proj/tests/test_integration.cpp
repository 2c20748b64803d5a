#include "qscissors/harness/oracle_check.hpp"
#include "qscissors/harness/repro.hpp"
#include "qscissors/measures.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace qscissors;
using namespace qscissors::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("qscissors_integration_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

// Moderate-gain grid: N=1, mu in [0.05, 2], kappa in [0.5, 0.99] at eta = 0.01 is expected to
// beat the direct-transmission bound.
TEST(Integration, ModerateGridBeatsDirectCapacity) {
  const Json doc = Json::parse(R"({
    "schema_version": 1,
    "sweep": {"eta": [0.01], "N": [1],
              "mu": {"min": 0.05, "max": 2.0, "count": 20, "spacing": "log"},
              "kappa": {"min": 0.5, "max": 0.99, "count": 20, "spacing": "linear"}}
  })");
  const SweepConfig c = parse_sweep(doc);
  const SweepOutcome out = run_sweep(c, (scratch("moderate") / "s.csv").string(), false, nullptr);
  ASSERT_EQ(out.records.size(), 400u);
  const auto best = out.best_rci();
  ASSERT_TRUE(best.has_value());
  EXPECT_GT(best->rci, direct_capacity(0.01)) << "best at mu=" << best->mu << " kappa=" << best->kappa;
}

TEST(Integration, SweepToParetoPipeline) {
  ParetoConfig c = repro_pareto(true);
  c.run.threads = 0;
  const ParetoRun run = run_pareto(c);
  ASSERT_EQ(run.envelopes.size(), 2u);
  for (std::size_t k = 0; k < run.Ns.size(); ++k) {
    ASSERT_FALSE(run.envelopes[k].empty());
    for (const auto& r : run.samples[k]) EXPECT_GE(envelope_at(run.envelopes[k], r.p_succ), r.rci);
  }
  const Json s = pareto_summary(c, run);
  EXPECT_TRUE(s.contains("config_hash"));
  EXPECT_TRUE(s.contains("crossovers"));
}

TEST(Integration, ProductStaysBelowCapacityOnQuickSurfaces) {
  const fs::path dir = scratch("product");
  for (double eta : {0.01, 0.1}) {
    SweepConfig c = repro_surface(eta, {1, 2}, true);
    c.run.threads = 0;
    const SweepOutcome out = run_sweep(c, (dir / "s.csv").string(), false, nullptr);
    ASSERT_EQ(out.records.size(), out.total);
    for (const auto& r : out.records) EXPECT_LT(r.product, r.c_direct) << r.mu << " " << r.kappa;
  }
}

TEST(Integration, OracleGridAgrees) {
  OracleCheckConfig c;
  c.run.threads = 0;
  const OracleCheckRun run = run_oracle_check(c);
  EXPECT_EQ(run.rows.size(), 24u);
  EXPECT_EQ(run.disagreements(), 0u);
}

TEST(Integration, QuickReproAllFigures) {
  ReproOptions o;
  o.out_dir = scratch("repro").string();
  o.quick = true;
  o.threads = 0;
  for (const auto& fig : repro_figures()) {
    const ReproResult r = run_repro(fig, o);
    EXPECT_FALSE(r.files.empty()) << fig;
    for (const auto& f : r.files) EXPECT_TRUE(fs::exists(f)) << f;
    EXPECT_TRUE(fs::exists(fs::path(o.out_dir) / (fig + ".json"))) << fig;
  }
}
