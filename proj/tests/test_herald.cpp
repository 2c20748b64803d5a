#include "qscissors/herald.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace qscissors;
using qscissors::testing::max_abs_diff;

TEST(OnOffPatternTest, ValidateRejectsOverlapAndRange) {
  OnOffPattern p{{0}, {0}, {1}};
  EXPECT_THROW(p.validate(2), std::invalid_argument);
  OnOffPattern q{{0}, {}, {3}};
  EXPECT_THROW(q.validate(2), std::invalid_argument);
  OnOffPattern ok{{0}, {1}, {2}};
  EXPECT_NO_THROW(ok.validate(3));
}

TEST(Herald, ThermalClickProbability) {
  const double n = 0.37;
  EXPECT_NEAR(heralding_probability(thermal(n), {{}, {0}, {}}), n / (1 + n), 1e-15);
  EXPECT_NEAR(heralding_probability(thermal(n), {{0}, {}, {}}), 1 / (1 + n), 1e-15);
}

TEST(Herald, ClickOnTmsvIdler) {
  // Conditioned on a click in B, A holds sum_{k>=1} lambda^(k-1) (1 - lambda) |k><k|, mean photon number 1 + mu.
  const double mu = 0.6;
  HeraldResult h = herald(tmsv(mu), {{}, {1}, {0}});
  EXPECT_NEAR(h.probability, mu / (1 + mu), 1e-14);
  EXPECT_NEAR(h.cov(0, 0), 2 * (1 + mu) + 1, 1e-12);
  EXPECT_NEAR(h.cov(1, 1), 2 * (1 + mu) + 1, 1e-12);
  EXPECT_NEAR(h.cov(0, 1), 0.0, 1e-13);
  EXPECT_LT(h.mean.norm(), 1e-13);
}

TEST(Herald, InclusionExclusionComplementarity) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const GaussianState s = qscissors::testing::random_state(4, rng, 0.5);
    const double on = heralding_probability(s, {{0}, {1, 2}, {}});
    double rest = 0.0;
    for (int m = 0; m < 4; ++m) {
      OnOffPattern p;
      p.off.push_back(0);
      (m & 1 ? p.on : p.off).push_back(1);
      (m & 2 ? p.on : p.off).push_back(2);
      if (m != 3) rest += heralding_probability(s, p);
    }
    EXPECT_NEAR(on + rest, vacuum_probability(s, {0}), 1e-12);
  }
}

TEST(Herald, OnAndOffMixturesRecombineToReducedState) {
  std::mt19937_64 rng(4);
  const GaussianState s = qscissors::testing::random_state(3, rng, 0.8);
  SignedGaussianMixture total = herald_mixture(s, {{}, {2}, {0, 1}});
  total.append(herald_mixture(s, {{2}, {}, {0, 1}}));
  const QMoments m = q_moments(total);
  const GaussianState r = partial_trace(s, {0, 1});
  EXPECT_LT(max_abs_diff(m.cov, r.cov()), 1e-12);
  EXPECT_LT((m.mean - r.mean()).norm(), 1e-12);
  EXPECT_NEAR(static_cast<double>(total.total_weight()), 1.0, 1e-15);
}

TEST(Herald, OffPatternMatchesGaussianConditioning) {
  std::mt19937_64 rng(8);
  const GaussianState s = qscissors::testing::random_state(3, rng);
  const HeraldResult h = herald(s, {{1, 2}, {}, {0}});
  const Conditioned c = condition(s, GaussianMeasurement::vacuum_projection({1, 2}));
  EXPECT_NEAR(h.probability, c.density, 1e-13);
  EXPECT_LT(max_abs_diff(h.cov, c.state.cov()), 1e-11);
  EXPECT_LT((h.mean - c.state.mean()).norm(), 1e-11);
}

TEST(Herald, PlanReusedAcrossMeans) {
  std::mt19937_64 rng(13);
  const GaussianState s = qscissors::testing::random_state(4, rng, 0.6);
  const OnOffPattern pat{{3}, {1, 2}, {0}};
  const HeraldPlan plan(s.cov(), pat);
  for (int k = 0; k < 3; ++k) {
    Vec d = Vec::Random(8);
    const GaussianState shifted = displace(s, d);
    const HeraldResult a = herald(shifted, pat);
    const HeraldResult b = finish_herald(plan.evaluate(shifted.mean()));
    EXPECT_NEAR(a.probability, b.probability, 1e-14);
    EXPECT_LT(max_abs_diff(a.cov, b.cov), 1e-12);
  }
}

TEST(Herald, ImpossiblePatternRaises) {
  EXPECT_THROW(herald(tensor(vacuum(1), tmsv(0.2)), {{}, {0}, {1}}), HeraldError);
  try {
    herald(tensor(vacuum(1), tmsv(0.2)), {{}, {0}, {1}});
  } catch (const HeraldError& e) {
    EXPECT_LT(e.probability(), tol::probability_floor);
  }
}

TEST(Herald, HeraldedCovariancesArePhysical) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianState s = qscissors::testing::random_state(5, rng, 0.4);
    const HeraldResult h = herald(s, {{4}, {2, 3}, {0, 1}});
    EXPECT_GE(physicality_margin(h.cov), -tol::physicality);
    EXPECT_LT(max_abs_diff(h.cov, h.cov.transpose()), tol::symmetry);
  }
}

TEST(Herald, CancellationRatioIsReported) {
  const SignedGaussianMixture m = herald_mixture(tmsv(0.01), {{}, {1}, {0}});
  EXPECT_GT(m.cancellation_ratio(), 1.0);
  EXPECT_EQ(m.components().size(), 2u);
}
