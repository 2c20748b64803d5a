#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace qscissors {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Signed mixtures cancel heavily; their components are carried in quad precision.
using Quad = boost::multiprecision::float128;
using QVec = Eigen::Matrix<Quad, Eigen::Dynamic, 1>;
using QMat = Eigen::Matrix<Quad, Eigen::Dynamic, Eigen::Dynamic>;

/// Neumaier-compensated running sum.
template <typename T>
class CompensatedSum {
 public:
  void add(const T& x) {
    T t = sum_ + x;
    using std::abs;
    if (abs(sum_) >= abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

inline QMat to_quad(const Mat& m) { return m.cast<Quad>(); }
inline QVec to_quad(const Vec& v) { return v.cast<Quad>(); }
Mat to_double(const QMat& m);
Vec to_double(const QVec& v);

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Nelder-Mead simplex minimisation (GSL nmsimplex2).
MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& start, const std::vector<double>& step,
                           double size_tol = 1e-10, int max_iter = 2000);

/// Golden-section minimisation on [lo, hi]; brackets the minimum with a coarse scan first.
MinimizeResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                              double x_tol = 1e-8, int scan_points = 21);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal: sum_i w_i f(z_i) ~ E[f(Z)], weights sum to one.
QuadratureRule gauss_hermite_normal(int n);

/// Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

}  // namespace qscissors
