#include "qscissors/gaussian.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace qscissors {

Mat symplectic_form(std::size_t modes) {
  const auto m = static_cast<Eigen::Index>(modes);
  Mat omega = Mat::Zero(2 * m, 2 * m);
  omega.topRightCorner(m, m) = Mat::Identity(m, m);
  omega.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
  return omega;
}

std::vector<Eigen::Index> quadrature_indices(const ModeList& modes, std::size_t total_modes) {
  std::vector<Eigen::Index> idx;
  idx.reserve(2 * modes.size());
  for (auto k : modes) {
    if (k >= total_modes) {
      throw std::invalid_argument(fmt::format("mode {} out of range for {} modes", k, total_modes));
    }
    idx.push_back(static_cast<Eigen::Index>(k));
  }
  for (auto k : modes) idx.push_back(static_cast<Eigen::Index>(k + total_modes));
  return idx;
}

Mat submatrix(const Mat& m, const std::vector<Eigen::Index>& rows,
              const std::vector<Eigen::Index>& cols) {
  Mat out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  }
  return out;
}

Vec subvector(const Vec& v, const std::vector<Eigen::Index>& idx) {
  Vec out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
  return out;
}

namespace {

void check_square_even(const Mat& cov, const char* who) {
  if (cov.rows() != cov.cols() || cov.rows() % 2 != 0 || cov.rows() == 0) {
    throw std::invalid_argument(
        fmt::format("{}: covariance must be a non-empty 2M x 2M matrix, got {}x{}", who,
                    cov.rows(), cov.cols()));
  }
}

ModeList complement(const ModeList& modes, std::size_t total) {
  std::vector<bool> used(total, false);
  for (auto k : modes) {
    if (k >= total) throw std::invalid_argument(fmt::format("mode {} out of range", k));
    if (used[k]) throw std::invalid_argument(fmt::format("mode {} listed twice", k));
    used[k] = true;
  }
  ModeList rest;
  for (std::size_t k = 0; k < total; ++k) {
    if (!used[k]) rest.push_back(k);
  }
  return rest;
}

}  // namespace

Vec symplectic_eigenvalues(const Mat& cov) {
  check_square_even(cov, "symplectic_eigenvalues");
  const Eigen::Index m = cov.rows() / 2;
  Mat sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw NumericalError("symplectic_eigenvalues: covariance is not positive definite");
  }
  Mat root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
             es.eigenvectors().transpose();
  Mat k = root * symplectic_form(static_cast<std::size_t>(m)) * root;
  // -K^2 = K^T K has each nu^2 twice.
  Eigen::SelfAdjointEigenSolver<Mat> ks(k.transpose() * k, Eigen::EigenvaluesOnly);
  Vec nu(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double a = std::max(ks.eigenvalues()(2 * i), 0.0);
    double b = std::max(ks.eigenvalues()(2 * i + 1), 0.0);
    nu(i) = std::sqrt(0.5 * (a + b));
  }
  return nu;
}

double physicality_margin(const Mat& cov) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (cov + cov.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) return -1.0;
  return symplectic_eigenvalues(cov).minCoeff() - 1.0;
}

double physicality_tolerance(const Mat& cov) {
  const double scale = cov.size() ? cov.cwiseAbs().maxCoeff() : 0.0;
  return std::max(tol::physicality, 16.0 * std::numeric_limits<double>::epsilon() * scale * scale);
}

GaussianState::GaussianState(Vec mean, Mat cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  check_square_even(cov_, "GaussianState");
  if (mean_.size() != cov_.rows()) {
    throw std::invalid_argument(fmt::format("GaussianState: mean has {} entries, covariance is {}x{}",
                                            mean_.size(), cov_.rows(), cov_.cols()));
  }
  if (!cov_.allFinite() || !mean_.allFinite()) {
    throw std::invalid_argument("GaussianState: non-finite entries");
  }
  double asym = (cov_ - cov_.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol::symmetry * std::max(1.0, cov_.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(fmt::format("GaussianState: covariance asymmetric by {:.3g}", asym));
  }
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  double margin = physicality_margin(cov_);
  if (margin < -physicality_tolerance(cov_)) {
    throw std::invalid_argument(
        fmt::format("GaussianState: unphysical covariance (min symplectic eigenvalue {:.12g})",
                    1.0 + margin));
  }
}

SymplecticOp::SymplecticOp(Mat matrix) : m_(std::move(matrix)) {
  check_square_even(m_, "SymplecticOp");
  Mat omega = symplectic_form(num_modes());
  double err = (m_ * omega * m_.transpose() - omega).cwiseAbs().maxCoeff();
  if (!(err <= tol::symplectic)) {
    throw std::invalid_argument(fmt::format("SymplecticOp: S Omega S^T deviates from Omega by {:.3g}", err));
  }
}

SymplecticOp SymplecticOp::inverse() const {
  Mat omega = symplectic_form(num_modes());
  return SymplecticOp(omega.transpose() * m_.transpose() * omega);
}

SymplecticOp operator*(const SymplecticOp& a, const SymplecticOp& b) {
  if (a.num_modes() != b.num_modes()) {
    throw std::invalid_argument("SymplecticOp: composing operators on different mode counts");
  }
  return SymplecticOp(a.m_ * b.m_);
}

GaussianState vacuum(std::size_t modes) {
  if (modes == 0) throw std::invalid_argument("vacuum: need at least one mode");
  const auto n = static_cast<Eigen::Index>(2 * modes);
  return GaussianState(Vec::Zero(n), Mat::Identity(n, n));
}

GaussianState tmsv(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument(fmt::format("tmsv: mean photon number must be >= 0, got {}", mu));
  }
  const double a = 2.0 * mu + 1.0;
  const double c = 2.0 * std::sqrt(mu * (mu + 1.0));
  Mat v(4, 4);
  v << a, c, 0, 0,
       c, a, 0, 0,
       0, 0, a, -c,
       0, 0, -c, a;
  return GaussianState(Vec::Zero(4), v);
}

GaussianState thermal(double mean_photons) {
  if (!(mean_photons >= 0.0)) {
    throw std::invalid_argument(fmt::format("thermal: mean photon number must be >= 0, got {}", mean_photons));
  }
  return GaussianState(Vec::Zero(2), (2.0 * mean_photons + 1.0) * Mat::Identity(2, 2));
}

GaussianState coherent(double x, double p) {
  Vec s(2);
  s << x, p;
  return GaussianState(s, Mat::Identity(2, 2));
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  const auto ma = static_cast<Eigen::Index>(a.num_modes());
  const auto mb = static_cast<Eigen::Index>(b.num_modes());
  const Eigen::Index m = ma + mb;
  Vec s = Vec::Zero(2 * m);
  Mat v = Mat::Zero(2 * m, 2 * m);
  // Interleave the x and p blocks of both factors.
  std::vector<Eigen::Index> ia, ib;
  for (Eigen::Index k = 0; k < ma; ++k) ia.push_back(k);
  for (Eigen::Index k = 0; k < ma; ++k) ia.push_back(m + k);
  for (Eigen::Index k = 0; k < mb; ++k) ib.push_back(ma + k);
  for (Eigen::Index k = 0; k < mb; ++k) ib.push_back(m + ma + k);
  for (std::size_t i = 0; i < ia.size(); ++i) {
    s(ia[i]) = a.mean()(i);
    for (std::size_t j = 0; j < ia.size(); ++j) v(ia[i], ia[j]) = a.cov()(i, j);
  }
  for (std::size_t i = 0; i < ib.size(); ++i) {
    s(ib[i]) = b.mean()(i);
    for (std::size_t j = 0; j < ib.size(); ++j) v(ib[i], ib[j]) = b.cov()(i, j);
  }
  return GaussianState(s, v);
}

SymplecticOp identity_op(std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(2 * modes);
  return SymplecticOp(Mat::Identity(n, n));
}

SymplecticOp beamsplitter(double t, std::size_t i, std::size_t j, std::size_t modes) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument(fmt::format("beamsplitter: transmissivity must lie in [0, 1], got {}", t));
  }
  if (i == j || i >= modes || j >= modes) {
    throw std::invalid_argument(fmt::format("beamsplitter: bad mode pair ({}, {}) for {} modes", i, j, modes));
  }
  const auto m = static_cast<Eigen::Index>(modes);
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  const double c = std::sqrt(t);
  const double s = std::sqrt(1.0 - t);
  Mat op = Mat::Identity(2 * m, 2 * m);
  for (Eigen::Index off : {Eigen::Index{0}, m}) {
    op(a + off, a + off) = c;
    op(a + off, b + off) = s;
    op(b + off, a + off) = -s;
    op(b + off, b + off) = c;
  }
  return SymplecticOp(op);
}

SymplecticOp phase_rotation(double theta, std::size_t mode, std::size_t modes) {
  if (mode >= modes) throw std::invalid_argument(fmt::format("phase_rotation: mode {} out of range", mode));
  const auto m = static_cast<Eigen::Index>(modes);
  const auto k = static_cast<Eigen::Index>(mode);
  Mat op = Mat::Identity(2 * m, 2 * m);
  op(k, k) = std::cos(theta);
  op(k, k + m) = std::sin(theta);
  op(k + m, k) = -std::sin(theta);
  op(k + m, k + m) = std::cos(theta);
  return SymplecticOp(op);
}

SymplecticOp squeezer(double r, std::size_t mode, std::size_t modes) {
  if (mode >= modes) throw std::invalid_argument(fmt::format("squeezer: mode {} out of range", mode));
  const auto m = static_cast<Eigen::Index>(modes);
  const auto k = static_cast<Eigen::Index>(mode);
  Mat op = Mat::Identity(2 * m, 2 * m);
  op(k, k) = std::exp(-r);
  op(k + m, k + m) = std::exp(r);
  return SymplecticOp(op);
}

SymplecticOp two_mode_squeezer(double r, std::size_t a, std::size_t b, std::size_t modes) {
  if (a == b || a >= modes || b >= modes) {
    throw std::invalid_argument(fmt::format("two_mode_squeezer: bad mode pair ({}, {})", a, b));
  }
  const auto m = static_cast<Eigen::Index>(modes);
  const auto i = static_cast<Eigen::Index>(a);
  const auto j = static_cast<Eigen::Index>(b);
  const double c = std::cosh(r);
  const double s = std::sinh(r);
  Mat op = Mat::Identity(2 * m, 2 * m);
  op(i, i) = c;
  op(i, j) = s;
  op(j, i) = s;
  op(j, j) = c;
  op(i + m, i + m) = c;
  op(i + m, j + m) = -s;
  op(j + m, i + m) = -s;
  op(j + m, j + m) = c;
  return SymplecticOp(op);
}

GaussianState apply(const GaussianState& state, const SymplecticOp& op) {
  if (op.num_modes() != state.num_modes()) {
    throw std::invalid_argument(fmt::format("apply: operator on {} modes, state has {}",
                                            op.num_modes(), state.num_modes()));
  }
  const Mat& s = op.matrix();
  return GaussianState(s * state.mean(), s * state.cov() * s.transpose());
}

GaussianState displace(const GaussianState& state, const Vec& d) {
  if (d.size() != state.mean().size()) {
    throw std::invalid_argument("displace: displacement has the wrong length");
  }
  return GaussianState(state.mean() + d, state.cov());
}

GaussianState pure_loss(const GaussianState& state, double eta, std::size_t mode) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument(fmt::format("pure_loss: transmissivity must lie in [0, 1], got {}", eta));
  }
  const std::size_t m = state.num_modes();
  if (mode >= m) throw std::invalid_argument(fmt::format("pure_loss: mode {} out of range", mode));
  const auto n = static_cast<Eigen::Index>(2 * m);
  Vec x = Vec::Ones(n);
  Mat y = Mat::Zero(n, n);
  for (Eigen::Index q : {static_cast<Eigen::Index>(mode), static_cast<Eigen::Index>(mode + m)}) {
    x(q) = std::sqrt(eta);
    y(q, q) = 1.0 - eta;
  }
  Mat v = x.asDiagonal() * state.cov() * x.asDiagonal();
  return GaussianState(x.asDiagonal() * state.mean(), v + y);
}

GaussianState partial_trace(const GaussianState& state, const ModeList& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: nothing kept");
  complement(keep, state.num_modes());  // validates range and duplicates
  auto idx = quadrature_indices(keep, state.num_modes());
  return GaussianState(subvector(state.mean(), idx), submatrix(state.cov(), idx, idx));
}

GaussianState permute(const GaussianState& state, const ModeList& order) {
  if (order.size() != state.num_modes()) {
    throw std::invalid_argument("permute: order must list every mode exactly once");
  }
  return partial_trace(state, order);
}

GaussianMeasurement GaussianMeasurement::heterodyne(ModeList modes, Vec outcome) {
  const auto n = static_cast<Eigen::Index>(2 * modes.size());
  return {MeasurementKind::heterodyne, std::move(modes), std::move(outcome), Mat::Identity(n, n)};
}

GaussianMeasurement GaussianMeasurement::vacuum_projection(ModeList modes) {
  const auto n = static_cast<Eigen::Index>(2 * modes.size());
  return {MeasurementKind::vacuum_projection, std::move(modes), Vec::Zero(n), Mat::Identity(n, n)};
}

GaussianMeasurement GaussianMeasurement::homodyne_x(std::size_t mode, double outcome) {
  return {MeasurementKind::homodyne_x, {mode}, Vec::Constant(1, outcome), Mat()};
}

GaussianMeasurement GaussianMeasurement::homodyne_p(std::size_t mode, double outcome) {
  return {MeasurementKind::homodyne_p, {mode}, Vec::Constant(1, outcome), Mat()};
}

GaussianMeasurement GaussianMeasurement::dual_homodyne(std::size_t a, std::size_t b, double gx,
                                                       double gp) {
  Vec r(2);
  r << gx, gp;
  return {MeasurementKind::dual_homodyne, {a, b}, r, Mat()};
}

GaussianMeasurement GaussianMeasurement::general(ModeList modes, Vec outcome, Mat meas_cov) {
  if (meas_cov.rows() != static_cast<Eigen::Index>(2 * modes.size()) ||
      physicality_margin(meas_cov) < -tol::physicality) {
    throw std::invalid_argument("GaussianMeasurement::general: measurement covariance must be physical");
  }
  return {MeasurementKind::general, std::move(modes), std::move(outcome), std::move(meas_cov)};
}

namespace {

// Conditioning on quadratures `q` with added measurement noise `noise` (zero for homodyne).
struct Gain {
  Vec mean;
  Mat cov;
  double quad_form;
  double log_det;
};

Gain condition_on(const GaussianState& state, const std::vector<Eigen::Index>& keep,
                  const std::vector<Eigen::Index>& q, const Vec& outcome, const Mat& noise) {
  Mat vqq = submatrix(state.cov(), q, q) + noise;
  Mat vkq = submatrix(state.cov(), keep, q);
  Eigen::LDLT<Mat> ldlt(vqq);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 0.0) {
    throw NumericalError("condition: measured block is singular");
  }
  Vec d = outcome - subvector(state.mean(), q);
  Vec sol = ldlt.solve(d);
  Gain g;
  g.mean = subvector(state.mean(), keep) + vkq * sol;
  g.cov = submatrix(state.cov(), keep, keep) - vkq * ldlt.solve(vkq.transpose());
  g.cov = 0.5 * (g.cov + g.cov.transpose()).eval();
  g.quad_form = d.dot(sol);
  g.log_det = ldlt.vectorD().array().log().sum();
  return g;
}

}  // namespace

Conditioned condition(const GaussianState& state, const GaussianMeasurement& m) {
  const std::size_t total = state.num_modes();
  ModeList rest = complement(m.modes, total);
  if (rest.empty()) throw std::invalid_argument("condition: every mode is measured");
  if (m.modes.empty()) throw std::invalid_argument("condition: no mode is measured");

  switch (m.kind) {
    case MeasurementKind::heterodyne:
    case MeasurementKind::vacuum_projection:
    case MeasurementKind::general: {
      const auto k = static_cast<Eigen::Index>(2 * m.modes.size());
      if (m.outcome.size() != k) {
        throw std::invalid_argument(fmt::format("condition: outcome needs {} entries, got {}", k, m.outcome.size()));
      }
      Mat noise = m.kind == MeasurementKind::general ? m.meas_cov : Mat::Identity(k, k);
      auto g = condition_on(state, quadrature_indices(rest, total),
                            quadrature_indices(m.modes, total), m.outcome, noise);
      const double dim = static_cast<double>(m.modes.size());
      double weight;
      if (m.kind == MeasurementKind::vacuum_projection) {
        weight = std::exp(dim * std::log(2.0) - g.quad_form - 0.5 * g.log_det);
      } else {
        weight = std::exp(-g.quad_form - 0.5 * g.log_det - dim * std::log(std::numbers::pi));
      }
      return {GaussianState(g.mean, g.cov), weight};
    }
    case MeasurementKind::homodyne_x:
    case MeasurementKind::homodyne_p: {
      if (m.modes.size() != 1 || m.outcome.size() != 1) {
        throw std::invalid_argument("condition: homodyne acts on one mode with one outcome");
      }
      auto mode = static_cast<Eigen::Index>(m.modes[0]);
      Eigen::Index q = m.kind == MeasurementKind::homodyne_x ? mode : mode + static_cast<Eigen::Index>(total);
      auto g = condition_on(state, quadrature_indices(rest, total), {q}, m.outcome, Mat::Zero(1, 1));
      double weight = std::exp(-g.quad_form - 0.5 * g.log_det - 0.5 * std::log(std::numbers::pi));
      return {GaussianState(g.mean, g.cov), weight};
    }
    case MeasurementKind::dual_homodyne: {
      if (m.modes.size() != 2 || m.outcome.size() != 2) {
        throw std::invalid_argument("condition: dual homodyne acts on two modes with two outcomes");
      }
      GaussianState mixed = apply(state, beamsplitter(0.5, m.modes[0], m.modes[1], total));
      std::vector<Eigen::Index> q = {static_cast<Eigen::Index>(m.modes[0]),
                                     static_cast<Eigen::Index>(m.modes[1] + total)};
      auto g = condition_on(mixed, quadrature_indices(rest, total), q, m.outcome, Mat::Zero(2, 2));
      double weight = std::exp(-g.quad_form - 0.5 * g.log_det - std::log(std::numbers::pi));
      return {GaussianState(g.mean, g.cov), weight};
    }
  }
  throw std::invalid_argument("condition: unknown measurement kind");
}

double vacuum_probability(const GaussianState& state, const ModeList& modes) {
  if (modes.empty()) return 1.0;
  complement(modes, state.num_modes());
  auto idx = quadrature_indices(modes, state.num_modes());
  Mat v = submatrix(state.cov(), idx, idx) + Mat::Identity(idx.size(), idx.size());
  Vec s = subvector(state.mean(), idx);
  Eigen::LDLT<Mat> ldlt(v);
  double quad = s.dot(ldlt.solve(s));
  double log_det = ldlt.vectorD().array().log().sum();
  return std::exp(static_cast<double>(modes.size()) * std::log(2.0) - quad - 0.5 * log_det);
}

std::complex<double> characteristic_function(const GaussianState& state, const Vec& xi) {
  if (xi.size() != state.mean().size()) {
    throw std::invalid_argument("characteristic_function: xi has the wrong length");
  }
  double re = -0.25 * xi.dot(state.cov() * xi);
  double im = xi.dot(state.mean());
  return std::exp(std::complex<double>(re, im));
}

void write_matrix(std::ostream& out, const Mat& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? " " : "") << fmt::format("{:.17g}", m(i, j));
    }
    out << '\n';
  }
}

Mat read_matrix(std::istream& in) {
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    throw std::invalid_argument("read_matrix: malformed header");
  }
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> m(i, j))) throw std::invalid_argument("read_matrix: truncated data");
    }
  }
  return m;
}

}  // namespace qscissors
