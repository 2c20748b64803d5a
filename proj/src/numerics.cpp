#include "qscissors/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_multimin.h>

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace qscissors {

Mat to_double(const QMat& m) {
  Mat out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = static_cast<double>(m(i, j));
  }
  return out;
}

Vec to_double(const QVec& v) {
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = static_cast<double>(v(i));
  return out;
}

namespace {

struct GslErrorsOff {
  gsl_error_handler_t* previous;
  GslErrorsOff() : previous(gsl_set_error_handler_off()) {}
  ~GslErrorsOff() { gsl_set_error_handler(previous); }
};

using Objective = std::function<double(const std::vector<double>&)>;

double multimin_trampoline(const gsl_vector* v, void* params) {
  const auto& f = *static_cast<const Objective*>(params);
  std::vector<double> x(v->size);
  for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
  double y = f(x);
  return std::isfinite(y) ? y : std::numeric_limits<double>::max();
}

using Scalar1 = std::function<double(double)>;

double min_trampoline(double x, void* params) {
  const auto& f = *static_cast<const Scalar1*>(params);
  double y = f(x);
  return std::isfinite(y) ? y : std::numeric_limits<double>::max();
}

}  // namespace

MinimizeResult nelder_mead(const Objective& f, const std::vector<double>& start,
                           const std::vector<double>& step, double size_tol, int max_iter) {
  if (start.empty() || start.size() != step.size()) {
    throw std::invalid_argument("nelder_mead: start and step must be non-empty and equally sized");
  }
  GslErrorsOff guard;
  const std::size_t n = start.size();
  Objective fn = f;
  gsl_multimin_function func{&multimin_trampoline, n, &fn};

  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(n), gsl_vector_free);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, start[i]);
    gsl_vector_set(ss.get(), i, step[i]);
  }
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n),
      gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(s.get(), &func, x.get(), ss.get());

  MinimizeResult result;
  int status = GSL_CONTINUE;
  int iter = 0;
  while (status == GSL_CONTINUE && iter < max_iter) {
    ++iter;
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), size_tol);
  }
  result.converged = status == GSL_SUCCESS;
  result.iterations = iter;
  result.value = s->fval;
  result.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.x[i] = gsl_vector_get(s->x, i);
  return result;
}

MinimizeResult golden_section(const Scalar1& f, double lo, double hi, double x_tol,
                              int scan_points) {
  if (!(hi > lo) || scan_points < 3) {
    throw std::invalid_argument(fmt::format("golden_section: bad interval [{}, {}]", lo, hi));
  }
  std::vector<double> xs(scan_points), ys(scan_points);
  int best = 0;
  for (int i = 0; i < scan_points; ++i) {
    xs[i] = lo + (hi - lo) * i / (scan_points - 1);
    ys[i] = f(xs[i]);
    if (!std::isfinite(ys[i])) ys[i] = std::numeric_limits<double>::max();
    if (ys[i] < ys[best]) best = i;
  }
  MinimizeResult result;
  result.x = {xs[best]};
  result.value = ys[best];
  if (best == 0 || best == scan_points - 1) {
    // Minimum sits on the boundary of the interval.
    result.converged = true;
    return result;
  }

  GslErrorsOff guard;
  Scalar1 fn = f;
  gsl_function func{&min_trampoline, &fn};
  std::unique_ptr<gsl_min_fminimizer, decltype(&gsl_min_fminimizer_free)> s(
      gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection), gsl_min_fminimizer_free);
  if (gsl_min_fminimizer_set_with_values(s.get(), &func, xs[best], ys[best], xs[best - 1],
                                         ys[best - 1], xs[best + 1], ys[best + 1]) != GSL_SUCCESS) {
    return result;
  }
  int status = GSL_CONTINUE;
  int iter = 0;
  while (status == GSL_CONTINUE && iter < 200) {
    ++iter;
    if (gsl_min_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    double a = gsl_min_fminimizer_x_lower(s.get());
    double b = gsl_min_fminimizer_x_upper(s.get());
    status = gsl_min_test_interval(a, b, x_tol, 0.0);
  }
  result.x = {gsl_min_fminimizer_x_minimum(s.get())};
  result.value = gsl_min_fminimizer_f_minimum(s.get());
  result.converged = status == GSL_SUCCESS;
  result.iterations = iter;
  return result;
}

namespace {

QuadratureRule fixed_rule(const gsl_integration_fixed_type* type, int n, double a, double b) {
  if (n < 1) throw std::invalid_argument(fmt::format("quadrature rule needs n >= 1, got {}", n));
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> w(
      gsl_integration_fixed_alloc(type, static_cast<std::size_t>(n), a, b, 0.0, 0.0),
      gsl_integration_fixed_free);
  if (!w) throw std::runtime_error("gsl_integration_fixed_alloc failed");
  const double* x = gsl_integration_fixed_nodes(w.get());
  const double* wt = gsl_integration_fixed_weights(w.get());
  QuadratureRule rule;
  rule.nodes.assign(x, x + n);
  rule.weights.assign(wt, wt + n);
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite_normal(int n) {
  // Weight exp(-z^2/2); rescaled so the weights sum to one.
  QuadratureRule rule = fixed_rule(gsl_integration_fixed_hermite, n, 0.0, 0.5);
  CompensatedSum<double> total;
  for (double w : rule.weights) total.add(w);
  for (double& w : rule.weights) w /= total.value();
  return rule;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (!(b > a)) throw std::invalid_argument(fmt::format("gauss_legendre: empty interval [{}, {}]", a, b));
  return fixed_rule(gsl_integration_fixed_legendre, n, a, b);
}

}  // namespace qscissors
