#include "qscissors/measures.hpp"
#include "qscissors/numerics.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace qscissors;
using qscissors::testing::max_abs_diff;

namespace {

/// Entanglement of formation of a symmetric two-mode state from its smallest
/// partially transposed symplectic eigenvalue.
double symmetric_eof(const BipartiteCov& v) {
  const double nu = pt_min_symplectic_eigenvalue(v);
  if (nu >= 1.0) return 0.0;
  const double cp = std::pow(1 / std::sqrt(nu) + std::sqrt(nu), 2) / 4;
  const double cm = std::pow(1 / std::sqrt(nu) - std::sqrt(nu), 2) / 4;
  return cp * std::log2(cp) - (cm > 0 ? cm * std::log2(cm) : 0.0);
}

Mat local_op(const std::vector<double>& q) {
  // q = (phi_a, s_a, theta_a, phi_b, s_b, theta_b)
  SymplecticOp l = phase_rotation(q[2], 0, 2) * squeezer(q[1], 0, 2) * phase_rotation(q[0], 0, 2);
  l = phase_rotation(q[5], 1, 2) * squeezer(q[4], 1, 2) * phase_rotation(q[3], 1, 2) * l;
  return l.matrix();
}

/// Largest margin lambda_min(V - sigma) over pure states sigma = L TMSV(r) L^T with local L.
double best_margin(const Mat& v, double r, std::vector<double>& warm, std::mt19937_64& rng) {
  const Mat t = tmsv(std::sinh(r) * std::sinh(r)).cov();
  auto margin = [&](const std::vector<double>& q) {
    const Mat l = local_op(q);
    const Mat d = v - l * t * l.transpose();
    return -Eigen::SelfAdjointEigenSolver<Mat>(d).eigenvalues().minCoeff();
  };
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  double best = -margin(warm);
  for (int start = 0; start < 12; ++start) {
    std::vector<double> x0 = warm;
    if (start > 0) {
      for (auto& x : x0) x = u(rng);
    }
    MinimizeResult m = nelder_mead(margin, x0, std::vector<double>(6, 0.3), 1e-9, 4000);
    if (-m.value > best) {
      best = -m.value;
      warm = m.x;
    }
  }
  return best;
}

double brute_force_eof(const Mat& v, double r_hi, std::mt19937_64& rng) {
  std::vector<double> warm(6, 0.0);
  double lo = 0.0, hi = r_hi;
  if (best_margin(v, hi, warm, rng) < 0) return std::numeric_limits<double>::infinity();
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    if (best_margin(v, mid, warm, rng) >= 0) hi = mid;
    else lo = mid;
  }
  return thermal_entropy(std::cosh(2 * hi));
}

BipartiteCov random_symmetric(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const double a = 1.0 + 3.0 * u(rng);
    const double c1 = a * u(rng), c2 = -a * u(rng);
    Mat v = Mat::Zero(4, 4);
    v << a, c1, 0, 0, c1, a, 0, 0, 0, 0, a, c2, 0, 0, c2, a;
    if (physicality_margin(v) < 1e-6) continue;
    std::vector<double> q(6);
    for (auto& x : q) x = 2.0 * u(rng) - 1.0;
    const Mat l = local_op(q);
    return BipartiteCov(l * v * l.transpose());
  }
}

}  // namespace

TEST(Entropy, ThermalEntropyValues) {
  EXPECT_NEAR(thermal_entropy(3.0), 2.0, 1e-12);
  EXPECT_EQ(thermal_entropy(1.0), 0.0);
  EXPECT_NEAR(thermal_entropy(1.0 + 1e-12), 0.0, 1e-9);
  EXPECT_THROW(thermal_entropy(0.5), NumericalError);
  EXPECT_NEAR(gaussian_entropy(tmsv(1.0).cov()), 0.0, 1e-9);
  EXPECT_NEAR(gaussian_entropy(thermal(1.0).cov()), 2.0, 1e-12);
}

TEST(Capacity, DirectTransmissionBound) {
  EXPECT_NEAR(direct_capacity(0.01), 0.0144995696951, 1e-12);
  EXPECT_NEAR(direct_capacity(0.1), 0.152003093445, 1e-12);
}

TEST(Rci, PureTmsvEqualsEntropy) {
  EXPECT_NEAR(gaussian_rci(BipartiteCov(tmsv(1.0).cov())), 2.0, 1e-9);
}

TEST(Rci, LossyTmsvBelowCapacity) {
  for (double mu : {0.1, 1.0, 10.0, 1000.0}) {
    const double r = gaussian_rci(BipartiteCov(pure_loss(tmsv(mu), 0.3, 1).cov()));
    EXPECT_LT(r, direct_capacity(0.3));
  }
  EXPECT_NEAR(gaussian_rci(BipartiteCov(pure_loss(tmsv(1e6), 0.3, 1).cov())), direct_capacity(0.3), 1e-4);
}

TEST(Rci, ProductStatesHaveNoCoherentInformation) {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 100; ++k) {
    const GaussianState s = tensor(qscissors::testing::random_state(1, rng, 2.0), qscissors::testing::random_state(1, rng, 2.0));
    EXPECT_LE(gaussian_rci(BipartiteCov(s.cov())), 1e-12);
  }
}

TEST(LogNegativity, Tmsv) {
  const double mu = 0.8, r = std::asinh(std::sqrt(mu));
  EXPECT_NEAR(log_negativity(BipartiteCov(tmsv(mu).cov())), 2 * r / std::log(2.0), 1e-10);
  EXPECT_EQ(log_negativity(BipartiteCov(Mat::Identity(4, 4))), 0.0);
}

TEST(StandardFormTest, InvariantUnderLocalOperations) {
  std::mt19937_64 rng(17);
  const GaussianState s = qscissors::testing::random_state(2, rng);
  const StandardForm f = standard_form(BipartiteCov(s.cov()));
  const Mat l = local_op({0.3, 0.5, -1.0, 2.0, -0.4, 0.1});
  const StandardForm g = standard_form(BipartiteCov(l * s.cov() * l.transpose()));
  EXPECT_NEAR(f.a, g.a, 1e-9);
  EXPECT_NEAR(f.b, g.b, 1e-9);
  EXPECT_NEAR(f.c1, g.c1, 1e-9);
  EXPECT_NEAR(f.c2, g.c2, 1e-9);
  EXPECT_GE(f.c1, std::abs(f.c2) - 1e-12);
}

TEST(BipartiteCovTest, RejectsUnphysical) {
  EXPECT_THROW(BipartiteCov(0.5 * Mat::Identity(4, 4)), std::invalid_argument);
  EXPECT_THROW(BipartiteCov(Mat::Identity(2, 2)), std::invalid_argument);
}

TEST(Geof, PureTmsv) {
  EXPECT_NEAR(geof_two_mode(BipartiteCov(tmsv(1.0).cov())), 2.0, 1e-6);
  EXPECT_EQ(geof_two_mode(BipartiteCov(Mat::Identity(4, 4))), 0.0);
}

TEST(Geof, SeparableStatesHaveZero) {
  const Mat v = pure_loss(pure_loss(tmsv(0.5), 0.2, 1), 0.2, 0).cov();
  Mat noisy = v + 0.8 * Mat::Identity(4, 4);
  ASSERT_GE(pt_min_symplectic_eigenvalue(BipartiteCov(noisy)), 1.0);
  EXPECT_EQ(geof_two_mode(BipartiteCov(noisy)), 0.0);
}

TEST(Geof, SymmetricStatesMatchClosedForm) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const BipartiteCov v = random_symmetric(rng);
    worst = std::max(worst, std::abs(geof_two_mode(v) - symmetric_eof(v)));
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Geof, PureStatesEqualEntanglementEntropy) {
  std::mt19937_64 rng(55);
  for (int k = 0; k < 10; ++k) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> q(6);
    for (auto& x : q) x = u(rng);
    const Mat l = local_op(q);
    const double mu = 0.05 + std::abs(u(rng));
    const Mat v = l * tmsv(mu).cov() * l.transpose();
    EXPECT_NEAR(geof_two_mode(BipartiteCov(v)), thermal_entropy(2 * mu + 1), 1e-6);
  }
}

TEST(Geof, GeneralStatesMatchBruteForceOverPureDecompositions) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 4; ++k) {
    // Asymmetric mixed states: lossy TMSV with local squeezing and thermal noise on one side.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GaussianState s = pure_loss(tmsv(0.3 + u(rng)), 0.3 + 0.6 * u(rng), 1);
    Mat v = s.cov();
    v(0, 0) += 0.3 * u(rng);
    v(2, 2) += 0.3 * u(rng);
    std::vector<double> q(6);
    for (auto& x : q) x = u(rng) - 0.5;
    const Mat l = local_op(q);
    const BipartiteCov bc(l * v * l.transpose());
    const GeofResult g = geof_two_mode_detail(bc);
    if (g.ebits == 0.0) continue;
    const double brute = brute_force_eof(bc.matrix(), g.squeezing + 0.05, rng);
    EXPECT_GE(brute, g.ebits - 1e-6) << "trial " << k;
    EXPECT_LE(brute, g.ebits + 1e-4) << "trial " << k;
  }
}

TEST(Entropy, ThermalEntropyIncreasing) {
  double last = -1.0;
  for (double x = 1.0; x <= 100.0; x += 0.25) {
    const double g = thermal_entropy(x);
    EXPECT_GT(g, last);
    last = g;
  }
}

TEST(Measures, InvariantUnderLocalSymplectics) {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const BipartiteCov v(qscissors::testing::random_state(2, rng, 0.3).cov());
    std::vector<double> q(6);
    for (auto& x : q) x = u(rng);
    const Mat l = local_op(q);
    const BipartiteCov w(l * v.matrix() * l.transpose());
    EXPECT_NEAR(gaussian_rci(v), gaussian_rci(w), 1e-8);
    EXPECT_NEAR(geof_two_mode(v), geof_two_mode(w), 1e-8);
  }
}

TEST(Geof, ZeroExactlyWhenPartialTransposeIsPhysical) {
  std::mt19937_64 rng(92);
  int entangled = 0, separable = 0;
  for (int k = 0; k < 60; ++k) {
    const BipartiteCov v(qscissors::testing::random_state(2, rng, 0.6).cov());
    const double e = geof_two_mode(v);
    EXPECT_GE(e, 0.0);
    if (pt_min_symplectic_eigenvalue(v) >= 1.0) {
      EXPECT_EQ(e, 0.0);
      ++separable;
    } else {
      EXPECT_GT(e, 0.0);
      ++entangled;
    }
  }
  EXPECT_GT(entangled, 0);
  EXPECT_GT(separable, 0);
}

TEST(Capacity, HalfTransmission) { EXPECT_EQ(direct_capacity(0.5), 1.0); }
