#include "qscissors/ecbox.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qscissors {

void EcBoxConfig::validate() const {
  if (!(mu >= 0.0) || !(mu_res >= 0.0) || !std::isfinite(mu) || !std::isfinite(mu_res)) {
    throw std::invalid_argument(fmt::format("EcBoxConfig: mu and mu_res must be non-negative, got {} and {}", mu, mu_res));
  }
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument(fmt::format("EcBoxConfig: eta must lie in (0, 1], got {}", eta));
  }
  if (N < 0 || N > 8) throw std::invalid_argument(fmt::format("EcBoxConfig: N must be in [0, 8], got {}", N));
  if (N > 0) {
    ScissorsConfig sc{N, kappa, mu_aux, eta, mu};
    sc.validate();
  }
  if (!std::isfinite(gain_a) || !std::isfinite(gain_b)) {
    throw std::invalid_argument("EcBoxConfig: gains must be finite");
  }
}

double effective_transmission(const EcBoxConfig& cfg) {
  cfg.validate();
  const double g2 = cfg.N > 0 ? (1.0 - cfg.kappa) / cfg.kappa : 1.0;
  return g2 * cfg.eta * cfg.mu_res / (1.0 + cfg.mu_res);
}

EcBox::EcBox(const EcBoxConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  constexpr std::size_t A = 0, In = 1, R = 2;
  std::vector<std::vector<Click>> patterns;
  if (cfg_.N == 0) {
    patterns.push_back({});
  } else if (cfg_.exhaustive_patterns) {
    patterns = all_click_patterns(cfg_.N);
  } else {
    patterns.push_back(std::vector<Click>(static_cast<std::size_t>(cfg_.N), Click::signal_port));
  }
  const double multiplicity = cfg_.N > 0 && !cfg_.exhaustive_patterns ? std::ldexp(1.0, cfg_.N) : 1.0;

  for (const auto& clicks : patterns) {
    CircuitLayout layout;
    layout.idler = layout.add_mode("A");
    layout.add_mode("In");
    layout.add_mode("R");
    const std::size_t rp = layout.add_mode("R'");
    using K = CircuitElement::Kind;
    layout.elements.push_back({K::tmsv, A, In, cfg_.mu, false});
    layout.elements.push_back({K::tmsv, R, rp, cfg_.mu_res, false});
    layout.elements.push_back({K::loss, rp, rp, cfg_.eta, false});
    OnOffPattern pattern;
    if (cfg_.N > 0) {
      append_nla(layout, rp, {cfg_.N, cfg_.kappa, cfg_.mu_aux, true}, clicks);
      pattern = layout.pattern(clicks);
    } else {
      layout.output = rp;
      pattern.kept = {A, rp};
    }
    // Undo the pi rotation the dual homodyne leaves on B.
    layout.elements.push_back({K::phase_flip, layout.output, layout.output, 0.0, false});

    const std::size_t m = layout.num_modes;
    GaussianState mixed = apply(run_gaussian(layout), beamsplitter(0.5, In, R, m));
    const std::vector<Eigen::Index> q = {static_cast<Eigen::Index>(In), static_cast<Eigen::Index>(R + m)};
    ModeList rest;
    std::vector<std::size_t> remap(m, m);
    for (std::size_t k = 0; k < m; ++k) {
      if (k == In || k == R) continue;
      remap[k] = rest.size();
      rest.push_back(k);
    }
    auto keep = quadrature_indices(rest, m);
    Mat vqq = submatrix(mixed.cov(), q, q);
    Mat vkq = submatrix(mixed.cov(), keep, q);
    Eigen::LDLT<Mat> ldlt(vqq);
    Mat gain = ldlt.solve(vkq.transpose()).transpose();
    Mat cond = submatrix(mixed.cov(), keep, keep) - gain * vkq.transpose();
    cond = 0.5 * (cond + cond.transpose()).eval();

    if (branches_.empty()) {
      outcome_cov_ = 0.5 * vqq;
      outcome_mean_ = Eigen::Vector2d::Zero();
    }
    OnOffPattern reduced;
    for (auto k : pattern.off) reduced.off.push_back(remap[k]);
    for (auto k : pattern.on) reduced.on.push_back(remap[k]);
    for (auto k : pattern.kept) reduced.kept.push_back(remap[k]);
    branches_.push_back({gain, HeraldPlan(cond, reduced), multiplicity});
  }
}

double EcBox::source_rate() const {
  return std::pow(cfg_.mu_aux / (1.0 + cfg_.mu_aux), cfg_.N);
}

double EcBox::outcome_density(double gx, double gp) const {
  Eigen::Vector2d d(gx - outcome_mean_(0), gp - outcome_mean_(1));
  const double q = d.dot(outcome_cov_.inverse() * d);
  return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(outcome_cov_.determinant()));
}

SignedGaussianMixture EcBox::conditional_mixture(double gx, double gp) const {
  const Eigen::Vector2d gamma(gx, gp);
  SignedGaussianMixture mix(2);
  for (const auto& b : branches_) mix.append(b.plan.evaluate(b.gain * gamma), Quad(b.multiplicity));
  return mix;
}

Vec EcBox::correction(double gx, double gp) const {
  const double s = std::sqrt(2.0);
  Vec d(4);
  d << -s * cfg_.gain_a * gx, s * cfg_.gain_b * gx, -s * cfg_.gain_a * gp, -s * cfg_.gain_b * gp;
  return d;
}

ConditionalHerald EcBox::herald(double gx, double gp) const {
  SignedGaussianMixture raw = conditional_mixture(gx, gp);
  const QVec shift = to_quad(correction(gx, gp));
  SignedGaussianMixture corrected(2);
  for (const auto& c : raw.components()) corrected.add({c.weight, c.mean + shift, c.cov});
  HeraldResult h = finish_herald(std::move(corrected));
  const double density = outcome_density(gx, gp);
  const double p_succ = h.probability / source_rate();
  return {gx, gp, density, p_succ, density * p_succ, std::move(h)};
}

OutcomeGrid EcBox::hermite_grid(int nodes) const {
  const QuadratureRule rule = gauss_hermite_normal(nodes);
  const Eigen::Matrix2d l = outcome_cov_.llt().matrixL();
  double zmax = 0.0;
  for (double z : rule.nodes) zmax = std::max(zmax, std::abs(z));
  const double inside = std::erf(zmax / std::sqrt(2.0));
  const double coverage = inside * inside;
  if (1.0 - coverage > tol::grid_coverage) {
    throw std::invalid_argument(fmt::format(
        "hermite_grid: {} nodes leave {:.3g} of the outcome probability outside the grid", nodes,
        1.0 - coverage));
  }
  OutcomeGrid grid{{}, coverage};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      Eigen::Vector2d g = outcome_mean_ + l * Eigen::Vector2d(rule.nodes[i], rule.nodes[j]);
      grid.nodes.push_back({g(0), g(1), rule.weights[i] * rule.weights[j]});
    }
  }
  return grid;
}

OutcomeGrid EcBox::disc_grid(double window, int radial, int angular) const {
  if (!(window > 0.0) || !std::isfinite(window)) {
    throw std::invalid_argument(fmt::format("disc_grid: empty window mass (window radius {})", window));
  }
  if (angular < 1) throw std::invalid_argument("disc_grid: need at least one angular node");
  const QuadratureRule r = gauss_legendre(radial, 0.0, window);
  OutcomeGrid grid{{}, 0.0};
  const double dtheta = 2.0 * std::numbers::pi / angular;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    for (int k = 0; k < angular; ++k) {
      const double th = dtheta * (k + 0.5);
      const double gx = r.nodes[i] * std::cos(th);
      const double gp = r.nodes[i] * std::sin(th);
      const double w = r.weights[i] * r.nodes[i] * dtheta * outcome_density(gx, gp);
      grid.nodes.push_back({gx, gp, w});
      grid.coverage += w;
    }
  }
  if (!(grid.coverage > 0.0)) throw std::invalid_argument("disc_grid: empty window mass");
  return grid;
}

ConditionalHerald herald_ecbox(const EcBoxConfig& cfg, double gx, double gp) {
  return EcBox(cfg).herald(gx, gp);
}

EcBoxSamples sample_ecbox(const EcBox& box, const OutcomeGrid& grid) {
  if (grid.nodes.empty()) throw std::invalid_argument("sample_ecbox: empty grid");
  EcBoxSamples s;
  CompensatedSum<double> grid_mass, success;
  for (const auto& node : grid.nodes) {
    SignedGaussianMixture mix = box.conditional_mixture(node.gx, node.gp);
    QMoments m = q_moments(mix);
    const double p = static_cast<double>(mix.total_weight()) / box.source_rate();
    s.weight.push_back(node.weight * p);
    s.mean.push_back(std::move(m.mean));
    s.cov.push_back(std::move(m.cov));
    s.shift.push_back(box.correction(node.gx, node.gp));
    s.mixture.push_back(std::move(mix));
    grid_mass.add(node.weight);
    success.add(node.weight * p);
  }
  s.grid_weight.reserve(grid.nodes.size());
  for (const auto& node : grid.nodes) s.grid_weight.push_back(node.weight);
  s.p_succ = success.value() / grid_mass.value();
  return s;
}

AverageState q1_average_state(const EcBoxSamples& s, double gain_scale) {
  CompensatedSum<double> total;
  for (double w : s.weight) total.add(w);
  const double wsum = total.value();
  if (!(wsum > 0.0)) throw NumericalError("q1_average_state: no heralded weight on the grid");
  Vec mean = Vec::Zero(4);
  for (std::size_t i = 0; i < s.weight.size(); ++i) mean += (s.weight[i] / wsum) * (s.mean[i] + gain_scale * s.shift[i]);
  Mat cov = Mat::Zero(4, 4);
  for (std::size_t i = 0; i < s.weight.size(); ++i) {
    const Vec d = s.mean[i] + gain_scale * s.shift[i] - mean;
    cov += (s.weight[i] / wsum) * (s.cov[i] + 2.0 * d * d.transpose());
  }
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {mean, cov, s.p_succ};
}

AverageState q1_average_state_pooled(const EcBoxSamples& s, double gain_scale) {
  SignedGaussianMixture pooled(2);
  for (std::size_t i = 0; i < s.mixture.size(); ++i) {
    const QVec shift = to_quad(Vec(gain_scale * s.shift[i]));
    const Quad w(s.grid_weight[i]);
    for (const auto& c : s.mixture[i].components()) pooled.add({c.weight * w, c.mean + shift, c.cov});
  }
  QMoments m = q_moments(pooled);
  return {m.mean, m.cov, s.p_succ};
}

double apply_measure(Measure m, const Mat& cov) {
  BipartiteCov v(cov);
  return m == Measure::geof ? geof_two_mode(v) : gaussian_rci(v);
}

double q2_average_measure(const EcBoxSamples& s, Measure m) {
  CompensatedSum<double> num, den;
  for (std::size_t i = 0; i < s.weight.size(); ++i) {
    num.add(s.weight[i] * apply_measure(m, s.cov[i]));
    den.add(s.weight[i]);
  }
  if (!(den.value() > 0.0)) throw NumericalError("q2_average_measure: no heralded weight on the grid");
  return num.value() / den.value();
}

GainOptimum optimize_q1_gain(const EcBoxSamples& s, Measure m, double max_scale) {
  auto f = [&](double scale) { return -apply_measure(m, q1_average_state(s, scale).cov); };
  MinimizeResult r = golden_section(f, 0.0, max_scale, 1e-6, 21);
  return {r.x[0], -r.value};
}

}  // namespace qscissors
