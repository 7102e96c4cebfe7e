#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "freeprob/distribution.hpp"
#include "freeprob/ncseries.hpp"

namespace freeprob {

// Cauchy transform through a realization, E_n[(b (x) 1 - 1 (x) a)^{-1}].
// Defined wherever the resolvent exists; throws SingularResolvent otherwise.
LevelMatrix cauchy_eval_realization(const Realization& r, const LevelMatrix& b);

struct SeriesValue {
  LevelMatrix value;
  // Rigorous bound on the dropped tail, sum_{k>L} ||b^{-1}||^{k+1} M^k.
  double tail = 0.0;
};

// Moment series sum_k b^{-1} m_k(b^{-1},...,b^{-1}) b^{-1} truncated at the
// stored order. Requires ||b^{-1}|| * M < 1; throws OutsideConvergence
// otherwise.
SeriesValue cauchy_eval_series(const Distribution& mu, const LevelMatrix& b);

// Route selection: exact backend when one is attached and b lies in the
// upper half-plane, moment series otherwise.
LevelMatrix cauchy_eval(const Distribution& mu, const LevelMatrix& b);

// F(b) = G(b)^{-1}. Verifies Im F(b) >= Im b up to tol plus the series tail
// where that route is taken; a larger defect throws DomainError.
LevelMatrix f_transform_eval(const Distribution& mu, const LevelMatrix& b, double tol = 1e-6);

// Series h with h(w) = G(w^{-1}) near 0: zero constant term, identity linear
// term, coefficient of arity ell equal to the sandwich map
// (w, b_1, ..., b_{ell-2}, w) -> w m_{ell-2}(b_1, ..., b_{ell-2}) w.
// Degree L+1, tail_bound M.
NCSeries h_series_from_moments(const Distribution& mu);

struct AsymptoticsRow {
  double y = 0.0;
  // || iy Q * g(iy Q) - 1 ||
  double residual = 0.0;
};

struct AsymptoticsReport {
  std::vector<AsymptoticsRow> rows;
  bool pass = false;
};

// Probes b G(b) -> 1 along the ray b = iy Q. pass when the residual at the
// top of the grid is below tol and did not grow over the last step.
AsymptoticsReport asymptotics_check(const std::function<LevelMatrix(const LevelMatrix&)>& g,
                                    const Matrix& Q, const std::vector<double>& y_grid,
                                    double tol = 1e-2);

// H(b) = b - F(b) for the independent-diagonal distribution. Has every local
// property of a Cauchy transform and satisfies b H(b) -> 1 along diagonal
// rays, but not along skew rays: the limit along iy Q is Q diag(Q^{-1}).
LevelMatrix counterexample_H(const LevelMatrix& b);

// Germ K with K(w) = H(w^{-1}) near 0, to coefficient degree L. Feeding this
// to certify_cauchy must fail the identity condition.
NCSeries counterexample_K_series(int L);

struct CauchyReport {
  bool identity_ok = false;
  double identity_residual = 0.0;
  // Residual of the coefficients against the two-sided factored form a
  // Cauchy transform must have.
  double bimodular_residual = 0.0;
  double bound_M = 0.0;
  double gram_min_eig = 0.0;
  bool pass = false;
};

struct CauchyCertification {
  CauchyReport report;
  // Recovered distribution, present exactly when report.pass.
  std::optional<Distribution> mu;
};

// Decides whether h is the germ G(w^{-1}) of some Sigma_0 distribution:
// linear coefficient must be the identity, empirical coefficient growth
// stays finite, and the moment Gram matrix is PSD down to -tol. Coefficients
// are taken to arity max(L+1, 2D+1), so the recovered distribution carries
// moments to order max(L, 2D). Requires h(0) = 0 within tol
// (NotNormalized otherwise).
CauchyCertification certify_cauchy(const NCOracle& h, int d, int L, int D, double tol = 1e-8);
CauchyCertification certify_cauchy(const NCSeries& h, int D, double tol = 1e-8);

struct DensityRow {
  double x = 0.0;
  double density = 0.0;
};

// Regularized density -(1/pi) Im tr_d G((x + iy) 1) on the given grid.
// Exact resolvent backend when attached, moment series otherwise (which
// throws OutsideConvergence beyond its convergence radius). workers > 1
// splits the grid across threads; output order is independent of workers.
std::vector<DensityRow> stieltjes_density(const Distribution& mu, const std::vector<double>& xs,
                                          double y = 1e-2, int workers = 1);

}  // namespace freeprob
