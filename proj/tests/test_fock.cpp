#include "qscissors/fock.hpp"
#include "qscissors/herald.hpp"
#include "qscissors/nla.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace qscissors;
using qscissors::testing::max_abs_diff;

namespace {

double relative_cov_error(const Mat& a, const Mat& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i; j < a.cols(); ++j) {
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::max(std::abs(b(i, j)), 1.0));
    }
  }
  return worst;
}

}  // namespace

TEST(FockStates, TmsvNormAndTail) {
  const double mu = 0.3;
  const FockVector v = fock_tmsv(mu, 10);
  const double lambda = mu / (1 + mu);
  EXPECT_NEAR(v.norm_squared(), 1.0 - std::pow(lambda, 10), 1e-14);
  EXPECT_NEAR(v.truncated_mass(), std::pow(lambda, 10), 1e-14);
  const QMoments m = fock_moments(to_density(v));
  EXPECT_LT(max_abs_diff(m.cov, tmsv(mu).cov()), 1e-4);
}

TEST(FockStates, IndexingAndTensor) {
  const FockVector a = fock_vacuum(2, 3);
  EXPECT_EQ(a.size(), 9u);
  EXPECT_EQ(a.index({1, 2}), 5u);
  const FockVector t = fock_tensor(a, fock_tmsv(0.1, 3));
  EXPECT_EQ(t.num_modes(), 4u);
  EXPECT_THROW(fock_vacuum(30, 4), std::invalid_argument);
}

TEST(FockOps, BeamsplitterMatchesPhaseSpace) {
  FockVector v = fock_tensor(fock_tmsv(0.2, 12), fock_vacuum(1, 12));
  fock_beamsplitter(v, 0.3, 1, 2);
  const QMoments m = fock_moments(to_density(v));
  const GaussianState g = apply(tensor(tmsv(0.2), vacuum(1)), beamsplitter(0.3, 1, 2, 3));
  EXPECT_LT(relative_cov_error(m.cov, g.cov()), 1e-6);
}

TEST(FockOps, BeamsplitterInverseRestoresState) {
  FockVector v = fock_tensor(fock_tmsv(0.02, 8), fock_tmsv(0.01, 8));
  const FockVector orig = v;
  fock_beamsplitter(v, 0.7, 1, 2);
  fock_beamsplitter(v, 0.7, 1, 2, true);
  double diff = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) diff = std::max(diff, std::abs(v[i] - orig[i]));
  EXPECT_LT(diff, 1e-6);
}

TEST(FockOps, DensityBeamsplitterAgreesWithVector) {
  FockVector v = fock_tensor(fock_tmsv(0.1, 6), fock_vacuum(1, 6));
  FockDensity d = to_density(v);
  fock_beamsplitter(v, 0.4, 0, 2);
  fock_beamsplitter(d, 0.4, 0, 2);
  EXPECT_LT((d.rho - to_density(v).rho).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FockOps, LossMatchesPhaseSpace) {
  const FockDensity d = fock_loss(to_density(fock_tmsv(0.2, 12)), 0.35, 1);
  const QMoments m = fock_moments(d);
  EXPECT_LT(relative_cov_error(m.cov, pure_loss(tmsv(0.2), 0.35, 1).cov()), 1e-6);
}

TEST(FockOps, PiPhaseFlipsQuadratures) {
  FockVector v = fock_tmsv(0.2, 10);
  fock_phase(v, 3.141592653589793, 1);
  const QMoments m = fock_moments(to_density(v));
  EXPECT_NEAR(m.cov(0, 1), -tmsv(0.2).cov()(0, 1), 1e-6);
  EXPECT_NEAR(m.cov(2, 3), -tmsv(0.2).cov()(2, 3), 1e-6);
}

TEST(FockOps, ExactScissorsTruncateAndAmplify) {
  const double mu = 0.1, g = 3.0;
  const ScissorsOutcome out = fock_scissors_exact(fock_tmsv(mu, 8), g, 1);
  const double lambda = mu / (1 + mu);
  EXPECT_NEAR(out.probability, (1 - lambda) * (1 + g * g * lambda) / (1 + g * g), 1e-12);
  const double a00 = std::abs(out.state[out.state.index({0, 0})]);
  const double a11 = std::abs(out.state[out.state.index({1, 1})]);
  EXPECT_NEAR(a11 / a00, g * std::sqrt(lambda), 1e-12);
  EXPECT_NEAR(std::abs(out.state[out.state.index({2, 2})]), 0.0, 1e-15);
}

TEST(FockOps, OnOffMatchesGaussianHerald) {
  const double mu = 0.3;
  const auto [rho, p] = fock_onoff(fock_tmsv(mu, 25), {{}, {1}, {0}});
  EXPECT_NEAR(p, mu / (1 + mu), 1e-9);
  const HeraldResult h = herald(tmsv(mu), {{}, {1}, {0}});
  EXPECT_LT(relative_cov_error(fock_moments(rho).cov, h.cov), 1e-6);
}

TEST(FockOracle, SingleScissorAgreesWithGaussianHerald) {
  const ScissorsConfig cfg{1, 0.3, 0.01, 0.1, 0.1};
  const OracleResult o = fock_scissors_oracle(cfg, 12);
  const NlaHerald h = herald_nla(cfg);
  EXPECT_LT(std::abs(h.p_succ_prime - o.probability) / o.probability, 1e-4);
  EXPECT_LT(relative_cov_error(h.herald.cov, o.cov), 1e-4);
  EXPECT_LT(o.truncated_mass, 1e-8);
}

TEST(FockOracle, GenericReplayAgreesWithHandBuiltCircuit) {
  const ScissorsConfig cfg{1, 0.5, 0.01, 0.05, 0.1};
  const OracleResult a = fock_scissors_oracle(cfg, 8);
  const OracleResult b = fock_nla_replay(cfg, 8);
  EXPECT_NEAR(a.probability / b.probability, 1.0, 1e-6);
  EXPECT_LT(max_abs_diff(a.cov, b.cov), 1e-5);
}

TEST(FockOracle, TwoScissorReplayAtLowCutoff) {
  const ScissorsConfig cfg{2, 0.3, 0.01, 0.1, 0.02};
  const OracleResult o = fock_nla_replay(cfg, 4);
  const NlaHerald h = herald_nla(cfg);
  EXPECT_LT(std::abs(h.p_succ_prime - o.probability) / o.probability, 1e-3);
  EXPECT_LT(relative_cov_error(h.herald.cov, o.cov), 1e-3);
}

TEST(FockStates, SinglePhotonCovariance) {
  FockVector v(1, 4);
  v[v.index({1})] = 1.0;
  const QMoments m = fock_moments(to_density(v));
  EXPECT_LT(max_abs_diff(m.cov, 3.0 * Mat::Identity(2, 2)), 1e-12);
  EXPECT_LT(m.mean.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FockOracle, CutoffConvergenceOnOracleGrid) {
  for (double eta : {0.01, 0.1}) {
    for (double mu : {0.05, 0.1, 0.3, 0.5}) {
      for (double kappa : {0.3, 0.5, 0.7}) {
        const ScissorsConfig cfg{1, kappa, 0.01, eta, mu};
        const OracleResult a = fock_scissors_oracle(cfg, 12), b = fock_scissors_oracle(cfg, 16);
        EXPECT_LT(std::abs(a.probability - b.probability) / b.probability, 1e-6)
            << "eta=" << eta << " mu=" << mu << " kappa=" << kappa;
        EXPECT_LT(max_abs_diff(a.cov, b.cov), 1e-6) << "eta=" << eta << " mu=" << mu << " kappa=" << kappa;
      }
    }
  }
}

TEST(FockOracle, HeraldProbabilityOnRandomThreeModeStates) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double mu1 = 0.5 * u(rng);
    FockVector v = fock_tensor(fock_tmsv(mu1, 16), fock_vacuum(1, 16));
    GaussianState g = tensor(tmsv(mu1), vacuum(1));
    const double t1 = 0.1 + 0.8 * u(rng), t2 = 0.1 + 0.8 * u(rng), th = 6.0 * u(rng);
    fock_beamsplitter(v, t1, 1, 2);
    g = apply(g, beamsplitter(t1, 1, 2, 3));
    fock_phase(v, th, 2);
    g = apply(g, phase_rotation(th, 2, 3));
    fock_beamsplitter(v, t2, 0, 2);
    g = apply(g, beamsplitter(t2, 0, 2, 3));
    for (const OnOffPattern& p : {OnOffPattern{{1}, {0}, {2}}, OnOffPattern{{0}, {1}, {2}}, OnOffPattern{{}, {1}, {0, 2}},
                                  OnOffPattern{{}, {0, 1}, {2}}}) {
      const double pf = fock_onoff(v, p).second;
      const double pg = heralding_probability(g, p);
      EXPECT_NEAR(pf, pg, 1e-6) << "trial " << trial;
    }
  }
}
