#include "qscissors/ecbox.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

using namespace qscissors;
using qscissors::testing::max_abs_diff;

namespace {

EcBoxConfig box_config(int n, double g) {
  EcBoxConfig c;
  c.N = n;
  c.kappa = ScissorsConfig::kappa_from_gain(g);
  return c;
}

}  // namespace

TEST(EcBoxTest, EffectiveTransmission) {
  EcBoxConfig c = box_config(1, 3.0);
  EXPECT_NEAR(effective_transmission(c), 9.0 * 0.01 * 0.33 / 1.33, 1e-15);
  c.N = 0;
  EXPECT_NEAR(effective_transmission(c), 0.01 * 0.33 / 1.33, 1e-15);
}

TEST(EcBoxTest, InvalidConfigurationThrows) {
  EcBoxConfig c;
  c.eta = 0.0;
  EXPECT_THROW(EcBox{c}, std::invalid_argument);
  c = EcBoxConfig{};
  c.N = -1;
  EXPECT_THROW(EcBox{c}, std::invalid_argument);
  c = EcBoxConfig{};
  c.mu_res = -0.1;
  EXPECT_THROW(EcBox{c}, std::invalid_argument);
}

TEST(EcBoxTest, ZeroOutcomeIsEntanglementSwapping) {
  // Bare teleporter, outcome 0: the corrected state equals the swapped state from a direct
  // dual-homodyne conditioning of TMSV(mu) x lossy TMSV(mu_res), up to the pi rotation on B.
  EcBoxConfig c;
  c.N = 0;
  c.mu = 0.4;
  c.mu_res = 0.7;
  c.eta = 0.3;
  const EcBox box(c);
  const ConditionalHerald h = box.herald(0.0, 0.0);
  const GaussianState src = tensor(tmsv(c.mu), pure_loss(tmsv(c.mu_res), c.eta, 1));
  const Conditioned swap = condition(src, GaussianMeasurement::dual_homodyne(1, 2, 0.0, 0.0));
  const GaussianState rotated = apply(swap.state, phase_rotation(std::numbers::pi, 1, 2));
  EXPECT_LT(max_abs_diff(h.herald.cov, rotated.cov()), 1e-12);
  EXPECT_NEAR(h.density, swap.density, 1e-12);
  EXPECT_NEAR(h.p_succ, 1.0, 1e-12);
}

TEST(EcBoxTest, TeleportationLimitIsIdentity) {
  EcBoxConfig c;
  c.N = 0;
  c.mu = 0.33;
  c.mu_res = 1e4;
  c.eta = 1.0;
  const EcBox box(c);
  const EcBoxSamples s = sample_ecbox(box, box.hermite_grid(21));
  const AverageState avg = q1_average_state(s);
  EXPECT_LT(max_abs_diff(avg.cov, tmsv(c.mu).cov()), 0.05);
}

TEST(EcBoxTest, PooledAndTotalCovarianceRoutesAgree) {
  const EcBox box(box_config(1, 3.0));
  const EcBoxSamples s = sample_ecbox(box, box.hermite_grid(21));
  for (double scale : {0.0, 0.7, 1.0}) {
    const AverageState a = q1_average_state(s, scale), b = q1_average_state_pooled(s, scale);
    EXPECT_LT(max_abs_diff(a.cov, b.cov), 1e-10);
  }
}

TEST(EcBoxTest, AverageOfMeasuresDominatesMeasureOfAverage) {
  for (double g : {1.5, 4.0}) {
    const EcBox box(box_config(1, g));
    const EcBoxSamples s = sample_ecbox(box, box.hermite_grid(21));
    const double q1 = apply_measure(Measure::geof, q1_average_state(s).cov);
    EXPECT_GE(q2_average_measure(s, Measure::geof) + 1e-8, q1);
  }
}

TEST(EcBoxTest, GridCoverage) {
  const EcBox box(box_config(1, 2.0));
  EXPECT_THROW(box.hermite_grid(5), std::invalid_argument);
  const OutcomeGrid g = box.hermite_grid(21);
  double w = 0.0;
  for (const auto& n : g.nodes) w += n.weight;
  EXPECT_NEAR(w, 1.0, 1e-12);
  EXPECT_GE(g.coverage, 1.0 - tol::grid_coverage);
}

TEST(EcBoxTest, DiscWindow) {
  const EcBox box(box_config(1, 2.0));
  EXPECT_THROW(box.disc_grid(0.0), std::invalid_argument);
  const OutcomeGrid small = box.disc_grid(0.3), large = box.disc_grid(8.0);
  EXPECT_GT(small.coverage, 0.0);
  EXPECT_LT(small.coverage, large.coverage);
  EXPECT_NEAR(large.coverage, 1.0, 1e-6);
}

TEST(EcBoxTest, OutcomeDensityNormalised) {
  const EcBox box(box_config(2, 2.0));
  double total = 0.0;
  const double h = 0.05;
  for (double x = -8; x <= 8; x += h) {
    for (double p = -8; p <= 8; p += h) total += h * h * box.outcome_density(x, p);
  }
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(EcBoxTest, BareTeleporterAlwaysSucceeds) {
  EcBoxConfig c;
  c.N = 0;
  const EcBox box(c);
  const EcBoxSamples s = sample_ecbox(box, box.hermite_grid(21));
  EXPECT_NEAR(s.p_succ, 1.0, 1e-12);
}

TEST(EcBoxTest, GainOptimumNotWorseThanUnitScale) {
  const EcBox box(box_config(1, 4.0));
  const EcBoxSamples s = sample_ecbox(box, box.hermite_grid(21));
  const GainOptimum opt = optimize_q1_gain(s, Measure::geof);
  EXPECT_GE(opt.value + 1e-9, apply_measure(Measure::geof, q1_average_state(s, 1.0).cov));
  EXPECT_GE(opt.scale, 0.0);
  EXPECT_LE(opt.scale, 2.0);
}

TEST(EcBoxTest, EffectiveTransmissionExample) {
  EcBoxConfig c = box_config(1, 2.0);
  EXPECT_NEAR(effective_transmission(c), 0.009925, 1e-6);
  c.N = 0;
  c.mu_res = 1e12;
  EXPECT_NEAR(effective_transmission(c), c.eta, 1e-12);
}

TEST(EcBoxTest, Q2IndependentOfCorrectionGains) {
  EcBoxConfig c = box_config(1, 4.0);
  EcBox base(c);
  const double ref = q2_average_measure(sample_ecbox(base, base.hermite_grid(21)), Measure::geof);
  for (auto [ga, gb] : {std::pair{0.0, 0.0}, std::pair{0.3, -1.2}, std::pair{1.0, 2.5}}) {
    c.gain_a = ga;
    c.gain_b = gb;
    const EcBox box(c);
    EXPECT_EQ(q2_average_measure(sample_ecbox(box, box.hermite_grid(21)), Measure::geof), ref);
  }
}

TEST(EcBoxTest, GainOptimumAtTeleportationLimitIsUnitGain) {
  EcBoxConfig c;
  c.N = 0;
  c.mu_res = 1e4;
  c.eta = 1.0;
  const EcBox box(c);
  const GainOptimum opt = optimize_q1_gain(sample_ecbox(box, box.hermite_grid(21)), Measure::geof);
  EXPECT_NEAR(opt.scale, 1.0, 0.05);
}

TEST(EcBoxTest, ShrinkingWindowNeverLowersAveragedRci) {
  for (int n : {1, 2}) {
    for (double g : {2.0, 6.0, 12.0}) {
      const EcBox box(box_config(n, g));
      double last = -std::numeric_limits<double>::infinity();
      for (double w : {2.0, 1.0, 0.5, 0.25, 0.1, 0.05}) {
        const double r = apply_measure(Measure::rci, q1_average_state(sample_ecbox(box, box.disc_grid(w))).cov);
        EXPECT_GE(r, last) << "N=" << n << " g=" << g << " w=" << w;
        last = r;
      }
    }
  }
}

TEST(EcBoxTest, FullAverageRciNegativeNarrowWindowPositive) {
  for (int n : {1, 2}) {
    for (double g : {2.0, 6.0, 12.0}) {
      const EcBox box(box_config(n, g));
      EXPECT_LT(apply_measure(Measure::rci, q1_average_state(sample_ecbox(box, box.hermite_grid(21))).cov), 0.0);
    }
  }
  const EcBox box(box_config(2, 12.0));
  EXPECT_GT(apply_measure(Measure::rci, q1_average_state(sample_ecbox(box, box.disc_grid(0.05))).cov), 0.0);
}

TEST(EcBoxTest, SymmetricInputsGiveZeroMeans) {
  const EcBox box(box_config(1, 3.0));
  EXPECT_LT(box.herald(0.0, 0.0).herald.mean.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(box.outcome_mean().cwiseAbs().maxCoeff(), 1e-15);
  const EcBoxSamples s = sample_ecbox(box, box.hermite_grid(21));
  EXPECT_LT(q1_average_state(s, 0.0).mean.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(q1_average_state(s, 1.0).mean.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EcBoxTest, CorrectionLeavesConditionalCovarianceUnchanged) {
  EcBoxConfig c = box_config(2, 2.0);
  const EcBox with(c);
  c.gain_a = 0.0;
  c.gain_b = 0.0;
  const EcBox without(c);
  for (auto [gx, gp] : {std::pair{0.3, -0.7}, std::pair{1.5, 0.2}}) {
    EXPECT_EQ(max_abs_diff(with.herald(gx, gp).herald.cov, without.herald(gx, gp).herald.cov), 0.0);
  }
}
