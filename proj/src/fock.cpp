#include "qscissors/fock.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qscissors {

namespace {

constexpr std::size_t kMaxAmplitudes = std::size_t{1} << 26;

std::size_t checked_size(std::size_t modes, int cutoff) {
  if (modes == 0) throw std::invalid_argument("Fock state needs at least one mode");
  if (cutoff < 2) throw std::invalid_argument(fmt::format("Fock cutoff must be >= 2, got {}", cutoff));
  std::size_t n = 1;
  for (std::size_t k = 0; k < modes; ++k) {
    n *= static_cast<std::size_t>(cutoff);
    if (n > kMaxAmplitudes) {
      throw std::invalid_argument(fmt::format("Fock space {}^{} is too large", cutoff, modes));
    }
  }
  return n;
}

std::vector<double> log_factorials(int n) {
  std::vector<double> lf(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) lf[k] = lf[k - 1] + std::log(static_cast<double>(k));
  return lf;
}

struct Transfer {
  int out;  // mi * d + mj
  double coeff;
};

// Beamsplitter action on |ni, nj>, restricted to outputs below the cutoff.
std::vector<std::vector<Transfer>> bs_transfer(double t, bool inverse, int d) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument(fmt::format("fock_beamsplitter: t must lie in [0, 1], got {}", t));
  }
  const double c = std::sqrt(t);
  const double s = inverse ? -std::sqrt(1.0 - t) : std::sqrt(1.0 - t);
  const auto lf = log_factorials(2 * d);
  auto binom = [&](int n, int k) { return std::exp(lf[n] - lf[k] - lf[n - k]); };
  auto ipow = [](double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
  };
  std::vector<std::vector<Transfer>> table(static_cast<std::size_t>(d * d));
  for (int ni = 0; ni < d; ++ni) {
    for (int nj = 0; nj < d; ++nj) {
      const int total = ni + nj;
      std::vector<double> amp(static_cast<std::size_t>(total) + 1, 0.0);
      // (c a_i^dag - s a_j^dag)^ni (s a_i^dag + c a_j^dag)^nj
      for (int k = 0; k <= ni; ++k) {
        for (int l = 0; l <= nj; ++l) {
          amp[k + l] += binom(ni, k) * binom(nj, l) * ipow(c, k) * ipow(-s, ni - k) * ipow(s, l) *
                        ipow(c, nj - l);
        }
      }
      auto& row = table[ni * d + nj];
      for (int mi = 0; mi <= total; ++mi) {
        const int mj = total - mi;
        if (mi >= d || mj >= d || amp[mi] == 0.0) continue;
        const double norm = std::exp(0.5 * (lf[mi] + lf[mj] - lf[ni] - lf[nj]));
        row.push_back({mi * d + mj, amp[mi] * norm});
      }
    }
  }
  return table;
}

// Applies the two-mode transfer to a raw amplitude array of the given shape.
void apply_transfer(Complex* amp, std::size_t size, std::size_t modes, int d,
                    const std::vector<std::vector<Transfer>>& table, std::size_t i, std::size_t j) {
  std::size_t si = 1, sj = 1;
  {
    std::size_t s = 1;
    for (std::size_t k = modes; k-- > 0;) {
      if (k == i) si = s;
      if (k == j) sj = s;
      s *= static_cast<std::size_t>(d);
    }
  }
  const auto ud = static_cast<std::size_t>(d);
  std::vector<Complex> in(ud * ud), out(ud * ud);
  for (std::size_t base = 0; base < size; ++base) {
    if ((base / si) % ud != 0 || (base / sj) % ud != 0) continue;
    bool any = false;
    for (std::size_t ni = 0; ni < ud; ++ni) {
      for (std::size_t nj = 0; nj < ud; ++nj) {
        in[ni * ud + nj] = amp[base + ni * si + nj * sj];
        any = any || in[ni * ud + nj] != Complex(0.0);
      }
    }
    if (!any) continue;
    std::fill(out.begin(), out.end(), Complex(0.0));
    for (std::size_t k = 0; k < in.size(); ++k) {
      if (in[k] == Complex(0.0)) continue;
      for (const auto& tr : table[k]) out[tr.out] += tr.coeff * in[k];
    }
    for (std::size_t mi = 0; mi < ud; ++mi) {
      for (std::size_t mj = 0; mj < ud; ++mj) amp[base + mi * si + mj * sj] = out[mi * ud + mj];
    }
  }
}

std::vector<int> digits(std::size_t index, std::size_t modes, int d) {
  std::vector<int> n(modes);
  for (std::size_t k = modes; k-- > 0;) {
    n[k] = static_cast<int>(index % static_cast<std::size_t>(d));
    index /= static_cast<std::size_t>(d);
  }
  return n;
}

void check_pair(std::size_t i, std::size_t j, std::size_t modes) {
  if (i == j || i >= modes || j >= modes) {
    throw std::invalid_argument(fmt::format("Fock beamsplitter: bad mode pair ({}, {})", i, j));
  }
}

}  // namespace

FockVector::FockVector(std::size_t modes, int cutoff)
    : modes_(modes), cutoff_(cutoff), amp_(checked_size(modes, cutoff), Complex(0.0)) {}

std::size_t FockVector::stride(std::size_t mode) const {
  if (mode >= modes_) throw std::invalid_argument(fmt::format("mode {} out of range", mode));
  std::size_t s = 1;
  for (std::size_t k = modes_ - 1; k > mode; --k) s *= static_cast<std::size_t>(cutoff_);
  return s;
}

std::size_t FockVector::index(const std::vector<int>& photons) const {
  if (photons.size() != modes_) throw std::invalid_argument("FockVector::index: wrong number of modes");
  std::size_t idx = 0;
  for (int n : photons) {
    if (n < 0 || n >= cutoff_) throw std::invalid_argument(fmt::format("photon number {} outside cutoff", n));
    idx = idx * static_cast<std::size_t>(cutoff_) + static_cast<std::size_t>(n);
  }
  return idx;
}

double FockVector::norm_squared() const {
  CompensatedSum<double> s;
  for (const auto& a : amp_) s.add(std::norm(a));
  return s.value();
}

FockVector fock_vacuum(std::size_t modes, int cutoff) {
  FockVector v(modes, cutoff);
  v[0] = 1.0;
  return v;
}

FockVector fock_tmsv(double mu, int cutoff) {
  if (!(mu >= 0.0)) throw std::invalid_argument(fmt::format("fock_tmsv: mu must be >= 0, got {}", mu));
  FockVector v(2, cutoff);
  const double chi = std::sqrt(mu / (1.0 + mu));
  double c = std::sqrt(1.0 - chi * chi);
  for (int n = 0; n < cutoff; ++n) {
    v[v.index({n, n})] = c;
    c *= chi;
  }
  v.add_truncated(1.0 - v.norm_squared());
  return v;
}

FockVector fock_tensor(const FockVector& a, const FockVector& b) {
  if (a.cutoff() != b.cutoff()) throw std::invalid_argument("fock_tensor: cutoffs differ");
  FockVector out(a.num_modes() + b.num_modes(), a.cutoff());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == Complex(0.0)) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  }
  out.add_truncated(a.truncated_mass() + b.truncated_mass());
  return out;
}

FockDensity to_density(const FockVector& v) {
  Eigen::Map<const Eigen::VectorXcd> psi(v.amplitudes().data(), static_cast<Eigen::Index>(v.size()));
  return {v.num_modes(), v.cutoff(), psi * psi.adjoint(), v.truncated_mass()};
}

void fock_beamsplitter(FockVector& v, double t, std::size_t i, std::size_t j, bool inverse) {
  check_pair(i, j, v.num_modes());
  const double before = v.norm_squared();
  auto table = bs_transfer(t, inverse, v.cutoff());
  apply_transfer(v.amplitudes().data(), v.size(), v.num_modes(), v.cutoff(), table, i, j);
  v.add_truncated(std::max(0.0, before - v.norm_squared()));
}

void fock_beamsplitter(FockDensity& d, double t, std::size_t i, std::size_t j, bool inverse) {
  check_pair(i, j, d.modes);
  const double before = d.rho.trace().real();
  auto table = bs_transfer(t, inverse, d.cutoff);
  const auto n = static_cast<std::size_t>(d.rho.rows());
  // U rho U^dag = (U (U rho)^dag)^dag; columns are contiguous in Eigen's storage.
  Eigen::MatrixXcd x = d.rho;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    apply_transfer(x.col(c).data(), n, d.modes, d.cutoff, table, i, j);
  }
  Eigen::MatrixXcd y = x.adjoint();
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    apply_transfer(y.col(c).data(), n, d.modes, d.cutoff, table, i, j);
  }
  d.rho = y.adjoint();
  d.truncated_mass += std::max(0.0, before - d.rho.trace().real());
}

void fock_phase(FockVector& v, double theta, std::size_t mode) {
  const std::size_t s = v.stride(mode);
  const auto d = static_cast<std::size_t>(v.cutoff());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto n = static_cast<double>((i / s) % d);
    v[i] *= std::polar(1.0, theta * n);
  }
}

void fock_phase(FockDensity& d, double theta, std::size_t mode) {
  if (mode >= d.modes) throw std::invalid_argument(fmt::format("mode {} out of range", mode));
  const auto n = d.rho.rows();
  Eigen::VectorXcd ph(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ph(i) = std::polar(1.0, theta * digits(static_cast<std::size_t>(i), d.modes, d.cutoff)[mode]);
  }
  d.rho = ph.asDiagonal() * d.rho * ph.conjugate().asDiagonal();
}

FockDensity fock_loss(const FockDensity& d, double eta, std::size_t mode) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument(fmt::format("fock_loss: eta must lie in [0, 1], got {}", eta));
  }
  if (mode >= d.modes) throw std::invalid_argument(fmt::format("mode {} out of range", mode));
  const auto lf = log_factorials(d.cutoff);
  // k(n, j) = sqrt(C(n, j)) eta^((n-j)/2) (1-eta)^(j/2)
  auto kraus = [&](int n, int j) {
    double c = std::exp(0.5 * (lf[n] - lf[j] - lf[n - j]));
    return c * std::pow(eta, 0.5 * (n - j)) * std::pow(1.0 - eta, 0.5 * j);
  };
  std::size_t s = 1;
  for (std::size_t k = d.modes - 1; k > mode; --k) s *= static_cast<std::size_t>(d.cutoff);
  const auto n = d.rho.rows();
  FockDensity out{d.modes, d.cutoff, Eigen::MatrixXcd::Zero(n, n), d.truncated_mass};
  std::vector<int> occ(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) occ[i] = static_cast<int>((static_cast<std::size_t>(i) / s) % d.cutoff);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (d.rho(a, b) == Complex(0.0)) continue;
      const int na = occ[a], nb = occ[b];
      for (int j = 0; j <= std::min(na, nb); ++j) {
        const auto shift = static_cast<Eigen::Index>(j * s);
        out.rho(a - shift, b - shift) += kraus(na, j) * kraus(nb, j) * d.rho(a, b);
      }
    }
  }
  return out;
}

ScissorsOutcome fock_scissors_exact(const FockVector& v, double g, std::size_t mode) {
  if (!(g >= 0.0)) throw std::invalid_argument(fmt::format("fock_scissors_exact: gain must be >= 0, got {}", g));
  FockVector out = v;
  const std::size_t s = out.stride(mode);
  const auto d = static_cast<std::size_t>(out.cutoff());
  const double norm = 1.0 / std::sqrt(1.0 + g * g);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t n = (i / s) % d;
    out[i] *= n == 0 ? norm : (n == 1 ? g * norm : 0.0);
  }
  const double p = out.norm_squared();
  if (p > 0.0) {
    for (auto& a : out.amplitudes()) a /= std::sqrt(p);
  }
  return {std::move(out), p};
}

namespace {

enum class Role { kept, off, on, traced };

std::vector<Role> roles(const OnOffPattern& pattern, std::size_t modes) {
  pattern.validate(modes);
  if (pattern.kept.empty()) throw std::invalid_argument("fock_onoff: nothing kept");
  std::vector<Role> r(modes, Role::traced);
  for (auto k : pattern.kept) r[k] = Role::kept;
  for (auto k : pattern.off) r[k] = Role::off;
  for (auto k : pattern.on) r[k] = Role::on;
  return r;
}

bool admissible(const std::vector<int>& n, const std::vector<Role>& r) {
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (r[k] == Role::off && n[k] != 0) return false;
    if (r[k] == Role::on && n[k] == 0) return false;
  }
  return true;
}

}  // namespace

std::pair<FockDensity, double> fock_onoff(const FockVector& v, const OnOffPattern& pattern) {
  const auto r = roles(pattern, v.num_modes());
  const int d = v.cutoff();
  const std::size_t kept_dim = checked_size(pattern.kept.size(), d);

  // Group amplitudes by the configuration of the non-kept modes.
  std::vector<std::size_t> rest_modes;
  for (std::size_t k = 0; k < v.num_modes(); ++k) {
    if (r[k] != Role::kept) rest_modes.push_back(k);
  }
  std::size_t rest_dim = 1;
  for (std::size_t k = 0; k < rest_modes.size(); ++k) rest_dim *= static_cast<std::size_t>(d);
  std::vector<long> column(rest_dim, -1);
  long n_cols = 0;
  for (std::size_t ri = 0; ri < rest_dim; ++ri) {
    auto n = digits(ri, rest_modes.size(), d);
    bool ok = true;
    for (std::size_t k = 0; k < rest_modes.size() && ok; ++k) {
      Role role = r[rest_modes[k]];
      ok = !(role == Role::off && n[k] != 0) && !(role == Role::on && n[k] == 0);
    }
    if (ok) column[ri] = n_cols++;
  }

  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kept_dim), n_cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == Complex(0.0)) continue;
    auto n = digits(i, v.num_modes(), d);
    std::size_t ki = 0, ri = 0;
    for (auto k : pattern.kept) ki = ki * d + n[k];
    for (auto k : rest_modes) ri = ri * d + n[k];
    if (column[ri] >= 0) psi(static_cast<Eigen::Index>(ki), column[ri]) = v[i];
  }
  FockDensity out{pattern.kept.size(), d, psi * psi.adjoint(), v.truncated_mass()};
  const double p = out.rho.trace().real();
  if (p > 0.0) out.rho /= p;
  return {std::move(out), p};
}

std::pair<FockDensity, double> fock_onoff(const FockDensity& dens, const OnOffPattern& pattern) {
  const auto r = roles(pattern, dens.modes);
  const int d = dens.cutoff;
  const std::size_t kept_dim = checked_size(pattern.kept.size(), d);
  const auto n = static_cast<std::size_t>(dens.rho.rows());
  std::vector<std::size_t> kept_index(n), rest_index(n);
  std::vector<bool> ok(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto occ = digits(i, dens.modes, d);
    ok[i] = admissible(occ, r);
    std::size_t ki = 0, ri = 0;
    for (std::size_t k = 0; k < dens.modes; ++k) {
      if (r[k] == Role::kept) continue;
      ri = ri * d + occ[k];
    }
    for (auto k : pattern.kept) ki = ki * d + occ[k];
    kept_index[i] = ki;
    rest_index[i] = ri;
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kept_dim), static_cast<Eigen::Index>(kept_dim));
  for (std::size_t a = 0; a < n; ++a) {
    if (!ok[a]) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (!ok[b] || rest_index[a] != rest_index[b]) continue;
      rho(kept_index[a], kept_index[b]) += dens.rho(a, b);
    }
  }
  FockDensity out{pattern.kept.size(), d, rho, dens.truncated_mass};
  const double p = out.rho.trace().real();
  if (p > 0.0) out.rho /= p;
  return {std::move(out), p};
}

QMoments fock_moments(const FockDensity& dens) {
  const std::size_t m = dens.modes;
  const int d = dens.cutoff;
  const auto n = dens.rho.rows();
  std::vector<std::vector<int>> occ(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) occ[i] = digits(static_cast<std::size_t>(i), m, d);
  std::vector<std::size_t> stride(m, 1);
  for (std::size_t k = m - 1; k-- > 0;) stride[k] = stride[k + 1] * static_cast<std::size_t>(d);

  // Tr(rho O) = sum_b rho(O b, b) coeff(b) for operators mapping basis states to basis states.
  Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
  Eigen::MatrixXcd mm = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::MatrixXcd nn = mm;
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto& o = occ[b];
    for (std::size_t k = 0; k < m; ++k) {
      if (o[k] == 0) continue;
      const Eigen::Index bk = b - static_cast<Eigen::Index>(stride[k]);
      const double ck = std::sqrt(static_cast<double>(o[k]));
      alpha(k) += dens.rho(b, bk) * ck;
      for (std::size_t l = 0; l < m; ++l) {
        // a_l a_k |b>
        const int nl = l == k ? o[l] - 1 : o[l];
        if (nl > 0) {
          const Eigen::Index bkl = bk - static_cast<Eigen::Index>(stride[l]);
          mm(l, k) += dens.rho(b, bkl) * ck * std::sqrt(static_cast<double>(nl));
        }
        // a_l^dag a_k |b>
        const int ml = l == k ? o[l] - 1 : o[l];
        if (ml + 1 < d) {
          const Eigen::Index bkl = bk + static_cast<Eigen::Index>(stride[l]);
          nn(l, k) += dens.rho(b, bkl) * ck * std::sqrt(static_cast<double>(ml + 1));
        }
      }
    }
  }
  // rho(b, c) pairs with <c|O|b>: the sums above give Tr(rho O) with O = a_k, a_l a_k, a_l^dag a_k.
  const auto mi = static_cast<Eigen::Index>(m);
  Vec mean(2 * mi);
  Mat sym(2 * mi, 2 * mi);
  for (Eigen::Index k = 0; k < mi; ++k) {
    mean(k) = std::sqrt(2.0) * alpha(k).real();
    mean(k + mi) = std::sqrt(2.0) * alpha(k).imag();
  }
  for (Eigen::Index k = 0; k < mi; ++k) {
    for (Eigen::Index l = 0; l < mi; ++l) {
      const double delta = k == l ? 0.5 : 0.0;
      const Complex mkl = mm(k, l);
      const Complex nkl = nn(k, l);  // <a_k^dag a_l>
      sym(k, l) = mkl.real() + nkl.real() + delta;
      sym(k + mi, l + mi) = -mkl.real() + nkl.real() + delta;
      sym(k, l + mi) = mkl.imag() + nkl.imag();
      sym(l + mi, k) = sym(k, l + mi);
    }
  }
  Mat cov = 2.0 * (sym - mean * mean.transpose());
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {mean, cov};
}

double top_level_population(const FockDensity& dens) {
  double worst = 0.0;
  for (std::size_t k = 0; k < dens.modes; ++k) {
    double pop = 0.0;
    for (Eigen::Index i = 0; i < dens.rho.rows(); ++i) {
      if (digits(static_cast<std::size_t>(i), dens.modes, dens.cutoff)[k] == dens.cutoff - 1) {
        pop += dens.rho(i, i).real();
      }
    }
    worst = std::max(worst, pop);
  }
  return worst;
}

OracleResult fock_scissors_oracle(const ScissorsConfig& cfg, int cutoff) {
  cfg.validate();
  if (cfg.N != 1) throw std::invalid_argument("fock_scissors_oracle: only N = 1 is supported");
  // Modes: 0 A, 1 A', 2 C, 3 D, 4 B, 5 environment of the lossy channel.
  constexpr std::size_t A = 0, S = 1, C = 2, D = 3, B = 4, E = 5;
  FockVector v(6, cutoff);
  const double chi = std::sqrt(cfg.mu / (1.0 + cfg.mu));
  const double chi_aux = std::sqrt(cfg.mu_aux / (1.0 + cfg.mu_aux));
  for (int n = 0; n < cutoff; ++n) {
    const double cn = std::sqrt(1.0 - chi * chi) * std::pow(chi, n);
    for (int k = 0; k < cutoff; ++k) {
      const double ck = std::sqrt(1.0 - chi_aux * chi_aux) * std::pow(chi_aux, k);
      v[v.index({n, n, k, k, 0, 0})] = cn * ck;
    }
  }
  v.add_truncated(1.0 - v.norm_squared());

  fock_beamsplitter(v, cfg.eta, S, E);
  fock_beamsplitter(v, cfg.kappa, B, C);
  fock_beamsplitter(v, 0.5, S, C);

  auto [rho_y, p_y] = fock_onoff(v, OnOffPattern{{C}, {S, D}, {A, B}});
  auto [rho_c, p_c] = fock_onoff(v, OnOffPattern{{S}, {C, D}, {A, B}});
  fock_phase(rho_c, std::numbers::pi, 1);

  FockDensity total{2, cutoff, (p_y * rho_y.rho + p_c * rho_c.rho) / (p_y + p_c), v.truncated_mass()};
  QMoments m = fock_moments(total);
  return {p_y + p_c, m.mean, m.cov, v.truncated_mass(), top_level_population(total)};
}

std::pair<FockDensity, double> fock_replay(const CircuitLayout& layout, const OnOffPattern& pattern,
                                           int cutoff) {
  using K = CircuitElement::Kind;
  std::size_t modes = layout.num_modes;
  std::vector<std::size_t> env;
  for (const auto& e : layout.elements) {
    if (e.kind == K::loss) env.push_back(modes++);
  }

  // Sources must act on modes no other element has touched yet.
  std::vector<bool> touched(layout.num_modes, false);
  std::vector<CircuitElement> sources;
  for (const auto& e : layout.elements) {
    if (e.kind == K::tmsv) {
      if (touched[e.a] || touched[e.b]) {
        throw std::invalid_argument("fock_replay: a TMSV source acts on a mode that is no longer vacuum");
      }
      sources.push_back(e);
    }
    touched[e.a] = touched[e.b] = true;
  }

  FockVector v(modes, cutoff);
  std::vector<double> chi;
  for (const auto& s : sources) chi.push_back(std::sqrt(s.value / (1.0 + s.value)));
  std::size_t combos = 1;
  for (std::size_t k = 0; k < sources.size(); ++k) combos *= static_cast<std::size_t>(cutoff);
  for (std::size_t c = 0; c < combos; ++c) {
    auto n = digits(c, sources.size(), cutoff);
    std::vector<int> occ(modes, 0);
    double amp = 1.0;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      occ[sources[k].a] = occ[sources[k].b] = n[k];
      amp *= std::sqrt(1.0 - chi[k] * chi[k]) * std::pow(chi[k], n[k]);
    }
    v[v.index(occ)] = amp;
  }
  v.add_truncated(1.0 - v.norm_squared());

  std::size_t next_env = 0;
  for (const auto& e : layout.elements) {
    switch (e.kind) {
      case K::tmsv:
        break;
      case K::loss:
        fock_beamsplitter(v, e.value, e.a, env[next_env++]);
        break;
      case K::beamsplitter:
        fock_beamsplitter(v, e.value, e.a, e.b, e.inverse);
        break;
      case K::phase_flip:
        fock_phase(v, std::numbers::pi, e.a);
        break;
    }
  }
  auto [rho, p] = fock_onoff(v, pattern);
  rho.rho *= p;
  return {std::move(rho), p};
}

OracleResult fock_nla_replay(const ScissorsConfig& cfg, int cutoff) {
  cfg.validate();
  Eigen::MatrixXcd total;
  double p = 0.0;
  double truncated = 0.0;
  for (const auto& clicks : all_click_patterns(cfg.N)) {
    CircuitLayout layout = direct_layout(cfg, clicks);
    auto [rho, pk] = fock_replay(layout, layout.pattern(clicks), cutoff);
    total = total.size() ? Eigen::MatrixXcd(total + rho.rho) : rho.rho;
    p += pk;
    truncated = std::max(truncated, rho.truncated_mass);
  }
  FockDensity dens{2, cutoff, total / p, truncated};
  QMoments m = fock_moments(dens);
  return {p, m.mean, m.cov, truncated, top_level_population(dens)};
}

}  // namespace qscissors
