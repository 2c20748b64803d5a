#pragma once

#include <stdexcept>
#include <string>

namespace qscissors {

namespace tol {
// Covariance matrices must be symmetric to this absolute accuracy.
inline constexpr double symmetry = 1e-10;
// Smallest symplectic eigenvalue may dip this far below one before a state is rejected.
inline constexpr double physicality = 1e-9;
// Symplectic condition S Omega S^T = Omega, entrywise.
inline constexpr double symplectic = 1e-10;
// Algebraic identities checked in tests.
inline constexpr double algebraic = 1e-12;
// Heralding probabilities below this are treated as failed events.
inline constexpr double probability_floor = 1e-14;
// Largest tolerated relative error estimate of a signed-mixture sum.
inline constexpr double cancellation = 1e-10;
// Oracle comparisons (Gaussian pipeline against truncated Fock space).
inline constexpr double oracle_relative = 1e-4;
// Truncated Fock tail mass above which an oracle result is flagged.
inline constexpr double fock_tail = 1e-8;
// Outcome-grid probability mass that must be captured by a quadrature grid.
inline constexpr double grid_coverage = 1e-6;
}  // namespace tol

/// Raised when a computation is numerically meaningless (cancellation, unphysical output).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A heralding event whose probability fell below the floor.
class HeraldError : public NumericalError {
 public:
  HeraldError(const std::string& what, double probability)
      : NumericalError(what), probability_(probability) {}
  double probability() const { return probability_; }

 private:
  double probability_;
};

}  // namespace qscissors
