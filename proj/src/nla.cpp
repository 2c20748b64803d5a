#include "qscissors/nla.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <stdexcept>

namespace qscissors {

double ScissorsConfig::gain() const { return std::sqrt((1.0 - kappa) / kappa); }

double ScissorsConfig::kappa_from_gain(double g) {
  if (!(g >= 0.0) || !std::isfinite(g)) {
    throw std::invalid_argument(fmt::format("gain must be finite and non-negative, got {}", g));
  }
  return 1.0 / (1.0 + g * g);
}

void ScissorsConfig::validate() const {
  if (N < 1 || N > 8) throw std::invalid_argument(fmt::format("N must be in [1, 8], got {}", N));
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw std::invalid_argument(fmt::format("kappa must lie in (0, 1), got {}", kappa));
  }
  if (!(mu_aux > 0.0) || !std::isfinite(mu_aux)) {
    throw std::invalid_argument(fmt::format("mu_aux must be positive, got {}", mu_aux));
  }
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument(fmt::format("eta must lie in (0, 1], got {}", eta));
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument(fmt::format("mu must be non-negative, got {}", mu));
  }
}

std::size_t CircuitLayout::add_mode(std::string name) {
  mode_names.push_back(std::move(name));
  return num_modes++;
}

OnOffPattern CircuitLayout::pattern(const std::vector<Click>& clicks) const {
  if (clicks.size() != scissors.size()) {
    throw std::invalid_argument(fmt::format("pattern: {} clicks for {} scissors", clicks.size(), scissors.size()));
  }
  OnOffPattern p;
  for (std::size_t i = 0; i < scissors.size(); ++i) {
    const auto& s = scissors[i];
    p.on.push_back(s.idler_detector);
    if (clicks[i] == Click::signal_port) {
      p.on.push_back(s.signal_detector);
      p.off.push_back(s.aux_detector);
    } else {
      p.on.push_back(s.aux_detector);
      p.off.push_back(s.signal_detector);
    }
  }
  for (auto c : check_ports) p.off.push_back(c);
  p.kept = {idler, output};
  return p;
}

void append_nla(CircuitLayout& layout, std::size_t signal, const NlaStage& stage,
                const std::vector<Click>& clicks) {
  const int n = stage.N;
  if (n < 1) throw std::invalid_argument(fmt::format("append_nla: N must be >= 1, got {}", n));
  if (clicks.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument(fmt::format("append_nla: {} clicks for N = {}", clicks.size(), n));
  }
  if (!(stage.kappa > 0.0 && stage.kappa < 1.0) || !(stage.mu_aux > 0.0)) {
    throw std::invalid_argument("append_nla: need kappa in (0, 1) and mu_aux > 0");
  }
  using K = CircuitElement::Kind;

  std::vector<std::size_t> chain = {signal};
  for (int k = 1; k < n; ++k) chain.push_back(layout.add_mode(fmt::format("split{}", k)));
  for (int k = 0; k + 1 < n; ++k) {
    layout.elements.push_back({K::beamsplitter, chain[k], chain[k + 1], 1.0 / (n - k), false});
  }

  std::vector<std::size_t> outputs;
  for (int i = 0; i < n; ++i) {
    std::size_t c = layout.add_mode(fmt::format("C{}", i + 1));
    std::size_t d = layout.add_mode(fmt::format("D{}", i + 1));
    std::size_t b = layout.add_mode(fmt::format("B{}", i + 1));
    layout.elements.push_back({K::tmsv, c, d, stage.mu_aux, false});
    layout.elements.push_back({K::beamsplitter, b, c, stage.kappa, false});
    layout.elements.push_back({K::beamsplitter, chain[i], c, 0.5, false});
    if (stage.feed_forward && clicks[i] == Click::aux_port) {
      layout.elements.push_back({K::phase_flip, b, b, 0.0, false});
    }
    layout.scissors.push_back({chain[i], c, d, b});
    outputs.push_back(b);
  }

  for (int k = n - 2; k >= 0; --k) {
    layout.elements.push_back({K::beamsplitter, outputs[k], outputs[k + 1], 1.0 / (n - k), true});
  }
  layout.output = outputs[0];
  layout.check_ports.assign(outputs.begin() + 1, outputs.end());
}

CircuitLayout direct_layout(const ScissorsConfig& cfg, const std::vector<Click>& clicks,
                            bool feed_forward) {
  cfg.validate();
  CircuitLayout layout;
  layout.idler = layout.add_mode("A");
  std::size_t sig = layout.add_mode("A'");
  layout.elements.push_back({CircuitElement::Kind::tmsv, layout.idler, sig, cfg.mu, false});
  layout.elements.push_back({CircuitElement::Kind::loss, sig, sig, cfg.eta, false});
  append_nla(layout, sig, {cfg.N, cfg.kappa, cfg.mu_aux, feed_forward}, clicks);
  return layout;
}

namespace {

// Applies a 4x4 block acting on (x_a, x_b, p_a, p_b) to V and s in place.
void apply_block(Mat& v, Vec& s, const Eigen::Matrix4d& t, std::size_t a, std::size_t b,
                 std::size_t modes) {
  const std::array<Eigen::Index, 4> idx = {
      static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b),
      static_cast<Eigen::Index>(a + modes), static_cast<Eigen::Index>(b + modes)};
  Eigen::Matrix<double, 4, Eigen::Dynamic> rows(4, v.cols());
  Eigen::Vector4d sv;
  for (int i = 0; i < 4; ++i) {
    rows.row(i) = v.row(idx[i]);
    sv(i) = s(idx[i]);
  }
  rows = t * rows;
  sv = t * sv;
  for (int i = 0; i < 4; ++i) {
    v.row(idx[i]) = rows.row(i);
    s(idx[i]) = sv(i);
  }
  Eigen::Matrix<double, Eigen::Dynamic, 4> cols(v.rows(), 4);
  for (int i = 0; i < 4; ++i) cols.col(i) = v.col(idx[i]);
  cols = cols * t.transpose();
  for (int i = 0; i < 4; ++i) v.col(idx[i]) = cols.col(i);
}

Eigen::Matrix4d bs_block(double t, bool inverse) {
  const double c = std::sqrt(t);
  const double s = std::sqrt(1.0 - t);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = c; m(0, 1) = s; m(1, 0) = -s; m(1, 1) = c;
  m(2, 2) = c; m(2, 3) = s; m(3, 2) = -s; m(3, 3) = c;
  return inverse ? Eigen::Matrix4d(m.transpose()) : m;
}

Eigen::Matrix4d tms_block(double mu) {
  const double r = std::asinh(std::sqrt(mu));
  const double c = std::cosh(r);
  const double s = std::sinh(r);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = c; m(0, 1) = s; m(1, 0) = s; m(1, 1) = c;
  m(2, 2) = c; m(2, 3) = -s; m(3, 2) = -s; m(3, 3) = c;
  return m;
}

}  // namespace

GaussianState run_gaussian(const CircuitLayout& layout) {
  const std::size_t m = layout.num_modes;
  if (m == 0) throw std::invalid_argument("run_gaussian: empty layout");
  const auto n = static_cast<Eigen::Index>(2 * m);
  Mat v = Mat::Identity(n, n);
  Vec s = Vec::Zero(n);
  using K = CircuitElement::Kind;
  for (const auto& e : layout.elements) {
    if (e.a >= m || e.b >= m) throw std::invalid_argument("run_gaussian: element mode out of range");
    switch (e.kind) {
      case K::tmsv:
        apply_block(v, s, tms_block(e.value), e.a, e.b, m);
        break;
      case K::beamsplitter:
        apply_block(v, s, bs_block(e.value, e.inverse), e.a, e.b, m);
        break;
      case K::loss: {
        const double r = std::sqrt(e.value);
        for (Eigen::Index q : {static_cast<Eigen::Index>(e.a), static_cast<Eigen::Index>(e.a + m)}) {
          v.row(q) *= r;
          v.col(q) *= r;
          v(q, q) += 1.0 - e.value;
          s(q) *= r;
        }
        break;
      }
      case K::phase_flip:
        for (Eigen::Index q : {static_cast<Eigen::Index>(e.a), static_cast<Eigen::Index>(e.a + m)}) {
          v.row(q) *= -1.0;
          v.col(q) *= -1.0;
          s(q) = -s(q);
        }
        break;
    }
  }
  return GaussianState(s, v);
}

std::pair<GaussianState, CircuitLayout> build_premeasurement(const ScissorsConfig& cfg,
                                                             std::vector<Click> clicks) {
  if (clicks.empty()) clicks.assign(static_cast<std::size_t>(cfg.N), Click::signal_port);
  CircuitLayout layout = direct_layout(cfg, clicks);
  GaussianState state = run_gaussian(layout);
  return {std::move(state), std::move(layout)};
}

std::vector<std::vector<Click>> all_click_patterns(int N) {
  std::vector<std::vector<Click>> out;
  for (unsigned mask = 0; mask < (1u << N); ++mask) {
    std::vector<Click> c(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) c[i] = (mask >> i) & 1u ? Click::aux_port : Click::signal_port;
    out.push_back(std::move(c));
  }
  return out;
}

NlaHerald herald_nla(const ScissorsConfig& cfg, const NlaOptions& options) {
  cfg.validate();
  SignedGaussianMixture mix(2);
  if (options.exhaustive_patterns || !options.feed_forward) {
    for (const auto& clicks : all_click_patterns(cfg.N)) {
      CircuitLayout layout = direct_layout(cfg, clicks, options.feed_forward);
      mix.append(herald_mixture(run_gaussian(layout), layout.pattern(clicks)));
    }
  } else {
    // With feed-forward every click assignment yields the same conditional state.
    std::vector<Click> clicks(static_cast<std::size_t>(cfg.N), Click::signal_port);
    CircuitLayout layout = direct_layout(cfg, clicks, true);
    mix.append(herald_mixture(run_gaussian(layout), layout.pattern(clicks)),
               Quad(std::ldexp(1.0, cfg.N)));
  }
  NlaHerald out{finish_herald(std::move(mix)), 0.0, 0.0, false};
  out.p_succ_prime = out.herald.probability;
  out.p_succ = out.p_succ_prime / std::pow(cfg.mu_aux / (1.0 + cfg.mu_aux), cfg.N);
  out.p_succ_valid = out.p_succ <= 1.0;
  return out;
}

EffectiveChannel ideal_nla_equivalent(double mu, double eta, double g) {
  if (!(mu >= 0.0) || !(eta > 0.0 && eta <= 1.0) || !(g >= 0.0)) {
    throw std::invalid_argument(fmt::format("ideal_nla_equivalent: bad parameters mu={} eta={} g={}", mu, eta, g));
  }
  const double chi = std::sqrt(mu / (1.0 + mu));
  const double f = 1.0 + (g * g - 1.0) * eta;
  const double chi_out = chi * std::sqrt(f);
  if (!(chi_out < 1.0)) {
    throw std::invalid_argument(fmt::format(
        "ideal_nla_equivalent: gain {} amplifies TMSV({}) beyond a normalisable state", g, mu));
  }
  return {chi_out * chi_out / (1.0 - chi_out * chi_out), g * g * eta / f};
}

}  // namespace qscissors
