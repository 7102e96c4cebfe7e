#pragma once

#include <vector>

#include "freeprob/distribution.hpp"

namespace freeprob {

// Linear map on M_d(C) stored as its d^2 x d^2 matrix on vectorized input.
struct CPMap {
  int d = 1;
  Matrix op;

  static CPMap identity(int d) {
    return {d, Matrix::Identity(Eigen::Index(d) * d, Eigen::Index(d) * d)};
  }
  static CPMap scaled_identity(double t, int d) {
    return {d, t * Matrix::Identity(Eigen::Index(d) * d, Eigen::Index(d) * d)};
  }

  Matrix apply(const Matrix& x) const { return unvec(op * vec(x), d); }
};

// Block matrix [rho(E_ij)]_{ij}; rho is completely positive iff this is PSD.
Matrix choi_matrix(const CPMap& rho);

bool is_completely_positive(const CPMap& rho, double tol = 1e-10, double* min_eig = nullptr);

// Free additive convolution through cumulant addition, truncated at the
// smaller of the two orders. The exponential bound adds.
Distribution convolve(const Distribution& a, const Distribution& b);

struct DivisibilityReport {
  double gram_min_eig = 0.0;
  bool pass = false;
};

// Infinite divisibility test: the cumulant functional
// rho(left X b_1 ... b_{m-1} X right) = left c^(m)(b_1, ..., b_{m-1}) right
// must be positive on the constant-free monomials of degree 1..D. Needs
// cumulants to order 2D (InsufficientOrder otherwise). For d = 1 this is
// the Hankel condition on (kappa_{i+j+2})_{ij}.
DivisibilityReport is_infinitely_divisible(const Distribution& mu, int D = 3, double tol = 1e-10);

// Semigroup action on an infinitely divisible mu: cumulant maps are pushed
// through rho on the output side. rho must be completely positive (NotCP)
// and mu must pass the divisibility test (NotInfinitelyDivisible).
Distribution semigroup_apply(const Distribution& mu, const CPMap& rho, int D = 3,
                             double tol = 1e-10);

// nu with nu convolved k times = mu: cumulants scaled by 1/k. Same
// preconditions as semigroup_apply with rho = id/k.
Distribution convolution_root(const Distribution& mu, int k, int D = 3, double tol = 1e-10);

struct PhiExtensionRow {
  double spectrum_floor = 0.0;
  bool certified = false;       // tail certificate held at this point
  double tail = 0.0;            // geometric bound on the dropped series tail
  double phi_margin = 0.0;      // largest eigenvalue of Im phi(b), <= 0 wanted
};

struct PhiExtensionReport {
  std::vector<PhiExtensionRow> rows;
  int certified_count = 0;
  bool all_certified = false;
};

// Probes how far the Voiculescu transform extends: evaluates the cumulant
// series at b^{-1} and certifies each value by a geometric tail bound built
// from the trailing coefficient growth. A series whose trailing
// coefficients vanish is its own extension and certifies at any margin
// (semicircular, point mass); a genuinely infinite cumulant family loses
// the certificate once ||b^{-1}|| approaches its convergence radius, the
// numerical shadow of a branch point.
PhiExtensionReport phi_extension_check(const Distribution& mu,
                                       const std::vector<LevelMatrix>& points,
                                       double tol = 1e-8);

}  // namespace freeprob
