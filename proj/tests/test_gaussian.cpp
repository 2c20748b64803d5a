#include "qscissors/gaussian.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace qscissors;
using qscissors::testing::max_abs_diff;

namespace {

bool preserves_form(const SymplecticOp& s) {
  const Mat omega = symplectic_form(s.num_modes());
  return max_abs_diff(s.matrix() * omega * s.matrix().transpose(), omega) < tol::symplectic;
}

}  // namespace

TEST(Symplectic, ElementaryOperationsPreserveForm) {
  EXPECT_TRUE(preserves_form(beamsplitter(0.3, 0, 2, 3)));
  EXPECT_TRUE(preserves_form(beamsplitter(0.3, 2, 0, 3)));
  EXPECT_TRUE(preserves_form(phase_rotation(1.1, 1, 3)));
  EXPECT_TRUE(preserves_form(squeezer(0.7, 2, 3)));
  EXPECT_TRUE(preserves_form(two_mode_squeezer(0.4, 0, 1, 3)));
  std::mt19937_64 rng(7);
  EXPECT_TRUE(preserves_form(qscissors::testing::random_symplectic(4, rng)));
}

TEST(Symplectic, InverseAndComposition) {
  std::mt19937_64 rng(11);
  const SymplecticOp s = qscissors::testing::random_symplectic(3, rng);
  EXPECT_LT(max_abs_diff((s * s.inverse()).matrix(), Mat::Identity(6, 6)), 1e-10);
  const SymplecticOp bs = beamsplitter(0.2, 0, 1, 2);
  EXPECT_LT(max_abs_diff(bs.inverse().matrix(), bs.matrix().transpose()), 1e-15);
}

TEST(Symplectic, RejectsNonSymplecticMatrix) {
  Mat m = Mat::Identity(2, 2);
  m(0, 0) = 2.0;
  EXPECT_THROW(SymplecticOp{m}, std::invalid_argument);
}

TEST(Symplectic, BeamsplitterConvention) {
  const Mat s = beamsplitter(0.25, 0, 1, 2).matrix();
  EXPECT_DOUBLE_EQ(s(0, 0), 0.5);
  EXPECT_NEAR(s(0, 1), std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(s(1, 0), -std::sqrt(0.75), 1e-15);
  EXPECT_DOUBLE_EQ(s(3, 3), 0.5);
}

TEST(GaussianStateTest, TmsvMatchesTwoModeSqueezer) {
  const double mu = 0.7;
  const GaussianState a = tmsv(mu);
  const GaussianState b = apply(vacuum(2), two_mode_squeezer(std::asinh(std::sqrt(mu)), 0, 1, 2));
  EXPECT_LT(max_abs_diff(a.cov(), b.cov()), 1e-12);
  EXPECT_NEAR(a.cov()(0, 0), 2 * mu + 1, 1e-14);
  EXPECT_NEAR(a.cov()(0, 1), 2 * std::sqrt(mu * (mu + 1)), 1e-14);
  EXPECT_NEAR(a.cov()(2, 3), -2 * std::sqrt(mu * (mu + 1)), 1e-14);
}

TEST(GaussianStateTest, SymplecticSpectrum) {
  const Vec pure = symplectic_eigenvalues(tmsv(2.0).cov());
  EXPECT_NEAR(pure(0), 1.0, 1e-10);
  EXPECT_NEAR(pure(1), 1.0, 1e-10);
  const Vec th = symplectic_eigenvalues(thermal(0.4).cov());
  EXPECT_NEAR(th(0), 1.8, 1e-12);
  std::mt19937_64 rng(3);
  GaussianState s = qscissors::testing::random_state(3, rng);
  EXPECT_GE(physicality_margin(s.cov()), -tol::physicality);
}

TEST(GaussianStateTest, ValidationRejectsBadCovariances) {
  EXPECT_THROW(GaussianState(Vec::Zero(2), 0.5 * Mat::Identity(2, 2)), std::invalid_argument);
  Mat asym = Mat::Identity(2, 2);
  asym(0, 1) = 0.3;
  EXPECT_THROW(GaussianState(Vec::Zero(2), asym), std::invalid_argument);
  EXPECT_THROW(GaussianState(Vec::Zero(3), Mat::Identity(3, 3)), std::invalid_argument);
  Mat nan = Mat::Identity(2, 2);
  nan(1, 1) = std::nan("");
  EXPECT_THROW(GaussianState(Vec::Zero(2), nan), std::invalid_argument);
}

TEST(GaussianStateTest, PureLossOnTmsv) {
  const double mu = 0.5, eta = 0.3;
  const Mat v = pure_loss(tmsv(mu), eta, 1).cov();
  const double c = 2 * std::sqrt(mu * (mu + 1));
  EXPECT_NEAR(v(0, 0), 2 * mu + 1, 1e-14);
  EXPECT_NEAR(v(1, 1), eta * (2 * mu + 1) + 1 - eta, 1e-14);
  EXPECT_NEAR(v(0, 1), std::sqrt(eta) * c, 1e-14);
  EXPECT_NEAR(v(2, 3), -std::sqrt(eta) * c, 1e-14);
  EXPECT_THROW(pure_loss(tmsv(mu), 1.5, 1), std::invalid_argument);
}

TEST(GaussianStateTest, PartialTraceAndPermute) {
  const GaussianState s = tensor(tmsv(0.3), coherent(0.5, -0.2));
  const GaussianState r = partial_trace(s, {1});
  EXPECT_LT(max_abs_diff(r.cov(), thermal(0.3).cov()), 1e-14);
  const GaussianState p = permute(s, {2, 0, 1});
  EXPECT_NEAR(p.mean()(0), 0.5, 1e-15);
  EXPECT_NEAR(p.mean()(3), -0.2, 1e-15);
  const GaussianState back = permute(p, {1, 2, 0});
  EXPECT_LT(max_abs_diff(back.cov(), s.cov()), 1e-15);
}

TEST(GaussianStateTest, DisplaceMovesMeanOnly) {
  Vec d(4);
  d << 0.1, 0.2, 0.3, 0.4;
  const GaussianState s = displace(tmsv(0.2), d);
  EXPECT_LT((s.mean() - d).norm(), 1e-15);
  EXPECT_LT(max_abs_diff(s.cov(), tmsv(0.2).cov()), 1e-15);
}

TEST(Measurement, VacuumProbabilities) {
  EXPECT_NEAR(vacuum_probability(coherent(0.6, -0.8), {0}), std::exp(-0.5), 1e-14);
  EXPECT_NEAR(vacuum_probability(thermal(0.25), {0}), 1.0 / 1.25, 1e-14);
  EXPECT_NEAR(vacuum_probability(tmsv(0.5), {0, 1}), 1.0 / 1.5, 1e-14);
  const Conditioned c = condition(tmsv(0.5), GaussianMeasurement::vacuum_projection({1}));
  EXPECT_NEAR(c.density, 1.0 / 1.5, 1e-14);
  EXPECT_LT(max_abs_diff(c.state.cov(), Mat::Identity(2, 2)), 1e-12);
}

TEST(Measurement, HomodyneOnTmsv) {
  const double mu = 0.8;
  const Conditioned c = condition(tmsv(mu), GaussianMeasurement::homodyne_x(0, 0.4));
  EXPECT_NEAR(c.state.cov()(0, 0), 1.0 / (2 * mu + 1), 1e-12);
  EXPECT_NEAR(c.state.cov()(1, 1), 2 * mu + 1, 1e-12);
  const double v = 2 * mu + 1;
  EXPECT_NEAR(c.density, std::exp(-0.16 / v) / std::sqrt(std::numbers::pi * v), 1e-13);
  EXPECT_NEAR(c.state.mean()(0), 2 * std::sqrt(mu * (mu + 1)) / v * 0.4, 1e-13);
}

TEST(Measurement, HomodyneDensityIntegratesToOne) {
  std::mt19937_64 rng(5);
  const GaussianState s = qscissors::testing::random_state(2, rng);
  double total = 0.0;
  const double h = 0.01;
  for (double x = -20; x <= 20; x += h) total += h * condition(s, GaussianMeasurement::homodyne_p(1, x)).density;
  EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(Measurement, HeterodyneIsDualHomodyneWithVacuum) {
  // Heterodyne of mode 0 equals dual homodyne of (0, ancilla vacuum) up to outcome scaling.
  const GaussianState s = tensor(tmsv(0.4), vacuum(1));
  const double gx = 0.3, gp = -0.5;
  Vec out(2);
  out << std::sqrt(2.0) * gx, -std::sqrt(2.0) * gp;
  const Conditioned het = condition(tmsv(0.4), GaussianMeasurement::heterodyne({0}, out));
  const Conditioned dh = condition(s, GaussianMeasurement::dual_homodyne(0, 2, gx, gp));
  EXPECT_LT(max_abs_diff(het.state.cov(), dh.state.cov()), 1e-12);
  EXPECT_LT((het.state.mean() - dh.state.mean()).norm(), 1e-12);
}

TEST(Measurement, ConditioningOnProductLeavesRest) {
  const GaussianState s = tensor(thermal(0.3), coherent(1.0, 2.0));
  const Conditioned c = condition(s, GaussianMeasurement::homodyne_x(0, 0.2));
  EXPECT_NEAR(c.state.mean()(0), 1.0, 1e-14);
  EXPECT_NEAR(c.state.mean()(1), 2.0, 1e-14);
}

TEST(CharacteristicFunction, VacuumAndDisplacement) {
  Vec xi(2);
  xi << 0.3, -0.7;
  EXPECT_NEAR(std::abs(characteristic_function(vacuum(1), xi)), std::exp(-xi.squaredNorm() / 4), 1e-15);
  const auto chi = characteristic_function(coherent(1.0, 0.0), xi);
  EXPECT_NEAR(std::arg(chi), 0.3, 1e-14);
}

TEST(MatrixIo, RoundTripIsExact) {
  std::mt19937_64 rng(9);
  const Mat v = qscissors::testing::random_state(3, rng).cov();
  std::stringstream ss;
  write_matrix(ss, v);
  const Mat back = read_matrix(ss);
  EXPECT_TRUE((back.array() == v.array()).all());
}

TEST(GaussianStateTest, LossComposes) {
  std::mt19937_64 rng(12);
  const GaussianState s = qscissors::testing::random_state(2, rng);
  const GaussianState twice = pure_loss(pure_loss(s, 0.6, 1), 0.3, 1);
  const GaussianState once = pure_loss(s, 0.18, 1);
  EXPECT_LT(max_abs_diff(twice.cov(), once.cov()), 1e-12);
  EXPECT_LT((twice.mean() - once.mean()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GaussianStateTest, BalancedSplitOfTmsvArm) {
  const double mu = 0.7;
  const GaussianState s = apply(tensor(tmsv(mu), vacuum(1)), beamsplitter(0.5, 1, 2, 3));
  const GaussianState b = partial_trace(s, {1});
  EXPECT_LT(max_abs_diff(b.cov(), thermal(mu / 2).cov()), 1e-12);
}
