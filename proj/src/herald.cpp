#include "qscissors/herald.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qscissors {

void OnOffPattern::validate(std::size_t num_modes) const {
  std::vector<int> seen(num_modes, 0);
  for (const ModeList* list : {&off, &on, &kept}) {
    for (auto k : *list) {
      if (k >= num_modes) {
        throw std::invalid_argument(fmt::format("OnOffPattern: mode {} out of range for {} modes", k, num_modes));
      }
      if (seen[k]++) {
        throw std::invalid_argument(fmt::format("OnOffPattern: mode {} appears more than once", k));
      }
    }
  }
  if (on.size() > 24) {
    throw std::invalid_argument(fmt::format("OnOffPattern: {} ON detectors is too many to enumerate", on.size()));
  }
}

void SignedGaussianMixture::add(MixtureComponent c) {
  const auto n = static_cast<Eigen::Index>(2 * modes_);
  if (c.mean.size() != n || c.cov.rows() != n || c.cov.cols() != n) {
    throw std::invalid_argument("SignedGaussianMixture: component has the wrong dimension");
  }
  components_.push_back(std::move(c));
}

void SignedGaussianMixture::append(const SignedGaussianMixture& other, const Quad& scale) {
  if (other.modes_ != modes_) {
    throw std::invalid_argument("SignedGaussianMixture: appending a mixture on a different mode count");
  }
  for (const auto& c : other.components_) components_.push_back({c.weight * scale, c.mean, c.cov});
}

Quad SignedGaussianMixture::total_weight() const {
  CompensatedSum<Quad> sum;
  for (const auto& c : components_) sum.add(c.weight);
  return sum.value();
}

Quad SignedGaussianMixture::absolute_weight() const {
  CompensatedSum<Quad> sum;
  for (const auto& c : components_) sum.add(abs(c.weight));
  return sum.value();
}

double SignedGaussianMixture::cancellation_ratio() const {
  Quad w = total_weight();
  if (w == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(absolute_weight() / abs(w));
}

QMoments q_moments(const SignedGaussianMixture& mixture) {
  const auto n = static_cast<Eigen::Index>(2 * mixture.num_modes());
  if (n == 0) throw std::invalid_argument("q_moments: mixture has no modes");
  if (mixture.components().empty()) throw std::invalid_argument("q_moments: empty mixture");

  const Quad w = mixture.total_weight();
  const double p = static_cast<double>(w);
  if (!(p >= tol::probability_floor)) {
    throw HeraldError(fmt::format("heralding probability {:.3g} is below the floor {:.0e}", p,
                                  tol::probability_floor),
                      p);
  }
  const double ratio = mixture.cancellation_ratio();
  const double estimate = ratio * static_cast<double>(mixture.components().size()) *
                          static_cast<double>(std::numeric_limits<Quad>::epsilon());
  if (!(estimate <= tol::cancellation)) {
    throw NumericalError(fmt::format(
        "signed mixture cancels too strongly: sum|w|/sum w = {:.3g}, relative error estimate {:.3g}",
        ratio, estimate));
  }

  QVec first = QVec::Zero(n);
  QMat second = QMat::Zero(n, n);
  const QMat id = QMat::Identity(n, n);
  for (const auto& c : mixture.components()) {
    first += c.weight * c.mean;
    // Q-function covariance of a Gaussian with covariance V is (V + I) / 2.
    second += c.weight * (Quad(0.5) * (c.cov + id) + c.mean * c.mean.transpose());
  }
  first /= w;
  second /= w;
  QMat q_cov = second - first * first.transpose();
  QMat v = Quad(2) * q_cov - id;
  v = (Quad(0.5) * (v + v.transpose())).eval();

  QMoments out{to_double(first), to_double(v)};
  double margin = physicality_margin(out.cov);
  if (!(margin >= -tol::physicality)) {
    throw NumericalError(fmt::format(
        "heralded covariance is unphysical (min symplectic eigenvalue {:.12g}, cancellation ratio {:.3g})",
        1.0 + margin, ratio));
  }
  return out;
}

HeraldPlan::HeraldPlan(const Mat& cov, const OnOffPattern& pattern)
    : total_modes_(static_cast<std::size_t>(cov.rows() / 2)), pattern_(pattern) {
  if (cov.rows() != cov.cols() || cov.rows() % 2 != 0) {
    throw std::invalid_argument("HeraldPlan: covariance must be 2M x 2M");
  }
  pattern_.validate(total_modes_);
  kept_ = quadrature_indices(pattern_.kept, total_modes_);
  const QMat v = to_quad(cov);
  const std::size_t n_on = pattern_.on.size();
  const Quad log2 = log(Quad(2));

  // Sum over subsets tau of the ON modes: (-1)^|tau| <vacuum on OFF and tau>.
  for (std::uint32_t mask = 0; mask < (1u << n_on); ++mask) {
    ModeList projected = pattern_.off;
    for (std::size_t b = 0; b < n_on; ++b) {
      if (mask & (1u << b)) projected.push_back(pattern_.on[b]);
    }
    Term t;
    t.negative = (std::popcount(mask) % 2) == 1;
    t.projected = quadrature_indices(projected, total_modes_);
    const auto np = static_cast<Eigen::Index>(t.projected.size());
    const auto nk = static_cast<Eigen::Index>(kept_.size());
    QMat vpp(np, np), vkp(nk, np), vkk(nk, nk);
    for (Eigen::Index i = 0; i < np; ++i) {
      for (Eigen::Index j = 0; j < np; ++j) vpp(i, j) = v(t.projected[i], t.projected[j]);
    }
    for (Eigen::Index i = 0; i < nk; ++i) {
      for (Eigen::Index j = 0; j < np; ++j) vkp(i, j) = v(kept_[i], t.projected[j]);
      for (Eigen::Index j = 0; j < nk; ++j) vkk(i, j) = v(kept_[i], kept_[j]);
    }
    if (np == 0) {
      t.log_norm = 0;
      t.inv = QMat(0, 0);
      t.gain = QMat::Zero(nk, 0);
      t.cov = vkk;
    } else {
      vpp += QMat::Identity(np, np);
      Eigen::LDLT<QMat> ldlt(vpp);
      if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0) {
        throw NumericalError("HeraldPlan: projected block is not positive definite");
      }
      Quad log_det = 0;
      for (Eigen::Index i = 0; i < np; ++i) log_det += log(ldlt.vectorD()(i));
      t.log_norm = Quad(static_cast<double>(projected.size())) * log2 - log_det / 2;
      t.inv = ldlt.solve(QMat::Identity(np, np));
      t.inv = (Quad(0.5) * (t.inv + t.inv.transpose())).eval();
      t.gain = vkp * t.inv;
      t.cov = vkk - t.gain * vkp.transpose();
      t.cov = (Quad(0.5) * (t.cov + t.cov.transpose())).eval();
    }
    terms_.push_back(std::move(t));
  }
}

SignedGaussianMixture HeraldPlan::evaluate(const Vec& mean) const {
  if (mean.size() != static_cast<Eigen::Index>(2 * total_modes_)) {
    throw std::invalid_argument("HeraldPlan::evaluate: mean has the wrong length");
  }
  SignedGaussianMixture mix(pattern_.kept.size());
  QVec s_k(kept_.size());
  for (std::size_t i = 0; i < kept_.size(); ++i) s_k(i) = Quad(mean(kept_[i]));
  for (const auto& t : terms_) {
    QVec s_p(t.projected.size());
    for (std::size_t i = 0; i < t.projected.size(); ++i) s_p(i) = Quad(mean(t.projected[i]));
    Quad quad = t.projected.empty() ? Quad(0) : Quad(s_p.dot(t.inv * s_p));
    Quad p = exp(t.log_norm - quad);
    QVec m = t.projected.empty() ? s_k : QVec(s_k - t.gain * s_p);
    mix.add({t.negative ? Quad(-p) : p, std::move(m), t.cov});
  }
  return mix;
}

SignedGaussianMixture herald_mixture(const GaussianState& state, const OnOffPattern& pattern) {
  return HeraldPlan(state.cov(), pattern).evaluate(state.mean());
}

double heralding_probability(const GaussianState& state, const OnOffPattern& pattern) {
  return static_cast<double>(herald_mixture(state, pattern).total_weight());
}

HeraldResult finish_herald(SignedGaussianMixture mixture) {
  if (mixture.num_modes() == 0) {
    throw std::invalid_argument("herald: no kept modes; use heralding_probability instead");
  }
  QMoments m = q_moments(mixture);
  double p = static_cast<double>(mixture.total_weight());
  return {p, std::move(m.mean), std::move(m.cov), std::move(mixture)};
}

HeraldResult herald(const GaussianState& state, const OnOffPattern& pattern) {
  return finish_herald(herald_mixture(state, pattern));
}

}  // namespace qscissors
