#include "qscissors/measures.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qscissors {

namespace {

using M2 = Eigen::Matrix2d;

// Quadrature positions of (x, p) for mode k of a two-mode xxpp vector.
constexpr std::array<int, 2> local(int k) { return {k, k + 2}; }

M2 spd_power(const M2& m, double power) {
  Eigen::SelfAdjointEigenSolver<M2> es(m);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw NumericalError("spd_power: matrix is not positive definite");
  }
  return es.eigenvectors() * es.eigenvalues().array().pow(power).matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

double lambda_min(double a, double d, double b) {
  return 0.5 * (a + d - std::hypot(a - d, 2.0 * b));
}

}  // namespace

BipartiteCov::BipartiteCov(Mat cov) : cov_(std::move(cov)) {
  if (cov_.rows() != 4 || cov_.cols() != 4) {
    throw std::invalid_argument(fmt::format("BipartiteCov: need a 4x4 covariance, got {}x{}", cov_.rows(), cov_.cols()));
  }
  GaussianState check(Vec::Zero(4), cov_);
  cov_ = check.cov();
}

BipartiteCov BipartiteCov::from_blocks(const M2& a, const M2& b, const M2& c) {
  Mat v(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      v(local(0)[i], local(0)[j]) = a(i, j);
      v(local(1)[i], local(1)[j]) = b(i, j);
      v(local(0)[i], local(1)[j]) = c(i, j);
      v(local(1)[j], local(0)[i]) = c(i, j);
    }
  }
  return BipartiteCov(v);
}

M2 BipartiteCov::block_a() const {
  M2 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = cov_(local(0)[i], local(0)[j]);
  return m;
}

M2 BipartiteCov::block_b() const {
  M2 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = cov_(local(1)[i], local(1)[j]);
  return m;
}

M2 BipartiteCov::block_c() const {
  M2 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = cov_(local(0)[i], local(1)[j]);
  return m;
}

double thermal_entropy(double x) {
  if (!(x >= 1.0 - tol::physicality)) {
    throw NumericalError(fmt::format("thermal_entropy: symplectic eigenvalue {:.12g} is below one", x));
  }
  if (x <= 1.0) return 0.0;
  const double up = 0.5 * (x + 1.0);
  const double down = 0.5 * (x - 1.0);
  return up * std::log2(up) - down * std::log2(down);
}

double gaussian_entropy(const Mat& cov) {
  Vec nu = symplectic_eigenvalues(cov);
  const double slack = physicality_tolerance(cov);
  double s = 0.0;
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    s += thermal_entropy(nu(i) >= 1.0 - slack ? std::max(nu(i), 1.0) : nu(i));
  }
  return s;
}

double gaussian_rci(const BipartiteCov& v) {
  return thermal_entropy(std::sqrt(v.block_a().determinant())) - gaussian_entropy(v.matrix());
}

double direct_capacity(double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw std::invalid_argument(fmt::format("direct_capacity: eta must lie in [0, 1), got {}", eta));
  }
  return -std::log2(1.0 - eta);
}

double pt_min_symplectic_eigenvalue(const BipartiteCov& v) {
  Mat t = v.matrix();
  t.row(3) *= -1.0;
  t.col(3) *= -1.0;
  return symplectic_eigenvalues(t).minCoeff();
}

double log_negativity(const BipartiteCov& v) {
  return std::max(0.0, -std::log2(pt_min_symplectic_eigenvalue(v)));
}

Mat StandardForm::matrix() const {
  Mat v(4, 4);
  v << a, c1, 0, 0,
       c1, b, 0, 0,
       0, 0, a, c2,
       0, 0, c2, b;
  return v;
}

StandardForm standard_form(const BipartiteCov& v) {
  const M2 A = v.block_a();
  const M2 B = v.block_b();
  const double a = std::sqrt(A.determinant());
  const double b = std::sqrt(B.determinant());
  const M2 la = spd_power(A / a, -0.5);
  const M2 lb = spd_power(B / b, -0.5);
  const M2 c = la * v.block_c() * lb.transpose();

  Eigen::JacobiSVD<M2> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double c1 = svd.singularValues()(0);
  double c2 = svd.singularValues()(1);
  // Only proper rotations are local symplectic maps; reflections flip the sign of c2.
  if (svd.matrixU().determinant() < 0.0) c2 = -c2;
  if (svd.matrixV().determinant() < 0.0) c2 = -c2;
  return {a, b, c1, c2};
}

GeofResult geof_two_mode_detail(const BipartiteCov& v) {
  if (pt_min_symplectic_eigenvalue(v) >= 1.0) return {0.0, 0.0, 0};

  const StandardForm sf = standard_form(v);
  const M2 vx = (M2() << sf.a, sf.c1, sf.c1, sf.b).finished();
  const M2 vp = (M2() << sf.a, sf.c2, sf.c2, sf.b).finished();
  const M2 vp_inv = vp.inverse();

  auto rho_of = [](const M2& x) { return std::abs(x(0, 1)) / std::sqrt(x(0, 0) * x(1, 1)); };
  auto ebits = [](double rho) {
    const double nu = 1.0 / std::sqrt(1.0 - rho * rho);
    return GeofResult{thermal_entropy(nu), 0.5 * std::acosh(nu), 0};
  };

  // Pure states x (+) x^-1 with vp^-1 <= x <= vx; minimise the correlation |rho(x)|.
  const M2 gap = vx - vp_inv;
  const double width = std::max(gap.cwiseAbs().maxCoeff(), 0.0);
  double hi = rho_of(vx);
  if (width < 1e-13) return ebits(hi);

  auto margin = [&](const std::vector<double>& p, double rho0) {
    const double x11 = p[0], x22 = p[1], x12 = p[2];
    if (!(x11 > 0.0 && x22 > 0.0)) return -std::numeric_limits<double>::max();
    const double up = lambda_min(vx(0, 0) - x11, vx(1, 1) - x22, vx(0, 1) - x12);
    const double down = lambda_min(x11 - vp_inv(0, 0), x22 - vp_inv(1, 1), x12 - vp_inv(0, 1));
    const double corr = rho0 * std::sqrt(x11 * x22) - std::abs(x12);
    return std::min({up, down, corr});
  };

  std::vector<std::vector<double>> starts;
  const M2 mid = 0.5 * (vx + vp_inv);
  starts.push_back({mid(0, 0), mid(1, 1), mid(0, 1)});
  for (int k = 1; k < 8; ++k) {
    // Points on the segment and slightly off it, all inside the feasible band.
    const double t = k / 8.0;
    const M2 x = vp_inv + t * gap;
    starts.push_back({x(0, 0), x(1, 1), x(0, 1) * (k % 2 ? 1.0 : 0.5)});
  }
  const std::vector<double> step = {0.1 * width, 0.1 * width, 0.1 * width};

  std::vector<double> warm = starts.front();
  auto feasible = [&](double rho0, bool full) {
    auto f = [&](const std::vector<double>& p) { return -margin(p, rho0); };
    double best = -std::numeric_limits<double>::max();
    std::vector<std::vector<double>> pts = {warm};
    if (full) pts.insert(pts.end(), starts.begin(), starts.end());
    else pts.push_back(starts.front());
    for (const auto& s : pts) {
      MinimizeResult r = nelder_mead(f, s, step, 1e-12 * (1.0 + width), 600);
      // Restart from the best point with smaller simplices.
      for (double shrink : {0.1, 0.01}) {
        if (-r.value >= 0.0) break;
        std::vector<double> small = step;
        for (auto& x : small) x *= shrink;
        MinimizeResult again = nelder_mead(f, r.x, small, 1e-12 * (1.0 + width), 600);
        if (again.value < r.value) r = again;
      }
      if (-r.value > best) {
        best = -r.value;
        warm = r.x;
      }
      if (best >= 0.0) break;
    }
    return best >= 0.0;
  };

  double lo = 0.0;
  int iter = 0;
  bool first = true;
  while (hi - lo > 1e-12 && iter < 60) {
    const double mid_rho = 0.5 * (lo + hi);
    if (feasible(mid_rho, first)) hi = mid_rho;
    else lo = mid_rho;
    first = false;
    ++iter;
  }
  GeofResult out = ebits(hi);
  out.iterations = iter;
  return out;
}

double geof_two_mode(const BipartiteCov& v) { return geof_two_mode_detail(v).ebits; }

}  // namespace qscissors
