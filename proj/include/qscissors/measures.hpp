#pragma once

#include "qscissors/gaussian.hpp"

namespace qscissors {

/// Two-mode covariance in xxpp order; mode 0 is A, mode 1 is B.
class BipartiteCov {
 public:
  /// Throws std::invalid_argument unless `cov` is a physical 4x4 covariance.
  explicit BipartiteCov(Mat cov);
  static BipartiteCov from_blocks(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b,
                                  const Eigen::Matrix2d& c);

  const Mat& matrix() const { return cov_; }
  /// Local (x, p) blocks and the A-B correlation block.
  Eigen::Matrix2d block_a() const;
  Eigen::Matrix2d block_b() const;
  Eigen::Matrix2d block_c() const;

 private:
  Mat cov_;
};

/// Entropy in bits of a single-mode thermal state with symplectic eigenvalue x.
double thermal_entropy(double x);

/// Von Neumann entropy in bits of a Gaussian state with covariance `cov`.
double gaussian_entropy(const Mat& cov);

/// Reverse coherent information S(A) - S(AB) in bits.
double gaussian_rci(const BipartiteCov& v);

/// -log2(1 - eta): the capacity of the lossy channel, assisted by two-way classical communication.
double direct_capacity(double eta);

/// Smallest symplectic eigenvalue of the partial transpose (p_B -> -p_B).
double pt_min_symplectic_eigenvalue(const BipartiteCov& v);

/// Logarithmic negativity in bits.
double log_negativity(const BipartiteCov& v);

/// Local-symplectic normal form: A = a I, B = b I, C = diag(c1, c2), c1 >= |c2|.
struct StandardForm {
  double a;
  double b;
  double c1;
  double c2;
  Mat matrix() const;
};
StandardForm standard_form(const BipartiteCov& v);

struct GeofResult {
  double ebits;
  double squeezing;  // r of the optimal pure state, ebits = g(cosh 2r)
  int iterations;
};

/// Gaussian entanglement of formation in ebits.
GeofResult geof_two_mode_detail(const BipartiteCov& v);
double geof_two_mode(const BipartiteCov& v);

}  // namespace qscissors
