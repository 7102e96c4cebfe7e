#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "freeprob/distribution.hpp"
#include "freeprob/ncseries.hpp"

namespace freeprob {

// Analytic map together with its directional derivative.
struct NCMap {
  std::function<LevelMatrix(const LevelMatrix&)> eval;
  // deriv(x, E) = d/dt eval(x + t E) at t = 0.
  std::function<LevelMatrix(const LevelMatrix&, const LevelMatrix&)> deriv;
};

// Exact term-by-term differential of a truncated series.
NCMap map_from_series(NCSeries s);

// Derivative by fourth-root-of-unity averaging of complex steps per
// direction, step 1e-8; exact for affine maps up to roundoff.
NCMap map_from_function(std::function<LevelMatrix(const LevelMatrix&)> f);

// F(w) = w + r(w^{-1}) with r the regular part of the reciprocal of the
// moment germ. Valid where the series converges, in particular at
// spectrum_floor(w) > M; the derivative applies the chain rule through
// w^{-1} exactly.
NCMap f_map_from_distribution(const Distribution& mu);

// Banach fixed point of w = b - phi(w) started at w = b. Under the standard
// strict-contraction hypotheses this computes F(b) for the distribution
// whose Voiculescu transform is phi. Divergence away from the start raises
// NoContraction, stagnation raises MaxIterations. When iterations is
// non-null it receives the number of phi evaluations performed.
LevelMatrix earle_hamilton(const std::function<LevelMatrix(const LevelMatrix&)>& phi,
                           const LevelMatrix& b, double tol = 1e-12, int max_iter = 500,
                           int* iterations = nullptr);

struct KantorovichCertificate {
  double eta = 0.0;          // ||J(x0)^{-1} (f(x0) - target)||
  double K = 0.0;            // Lipschitz constant of J(x0)^{-1} J on the working ball
  double h = 0.0;            // K * eta, must be <= 1/2
  double t_star = 0.0;       // existence radius around the first iterate
  double t_star_star = 0.0;  // uniqueness radius, +inf when K = 0
  bool converged = false;
  int iterations = 0;
};

struct NewtonResult {
  LevelMatrix root;
  LevelMatrix first_iterate;
  KantorovichCertificate cert;
};

// Damped-free Newton iteration for f(x) = target with a Kantorovich
// certificate computed at x0: eta and K as above, h = K eta,
// t_star = 2 eta / (1 + sqrt(1 - 2h)), t_star_star = (1 + sqrt(1 - 2h)) / K.
// The certified root lies within t_star of the first iterate. K is measured
// by sampling the derivative on spheres of radius 12 eta through 96 eta and
// applying the Schwarz-type Lipschitz bound 2 sup / (radius - 2 sigma) on
// the inner ball of radius sigma = 3 eta; each admissible sphere gives a
// valid bound and the smallest wins. Throws CertificateFailed when h > 1/2,
// SingularDerivative when J(x0) is not invertible.
NewtonResult newton_invert(const NCMap& f, const LevelMatrix& target, const LevelMatrix& x0,
                           double tol = 1e-12, int max_iter = 100);

// R-transform series: arity-ell coefficient is the order ell+1 cumulant.
NCSeries r_series(const Distribution& mu);

// Cumulants recovered through germ inversion: compositional inverse of the
// moment germ, then the regular part of its reciprocal. Independent of the
// partition-based route; the two must agree to roundoff.
std::vector<MultilinearMap> cumulants_via_series_inversion(const Distribution& mu);

// phi(b) = F^{<-1>}(b) - b by certified Newton inversion of F started at b.
LevelMatrix voiculescu_eval(const Distribution& mu, const LevelMatrix& b, double tol = 1e-12);

struct NevanlinnaRep {
  int d = 1;
  Matrix alpha;                           // self-adjoint constant
  std::vector<MultilinearMap> sigma;      // sigma[k] has arity k+1
  double gram_min_eig = 0.0;
  bool valid = false;
};

// Expansion F(b) = b - alpha - sum_ell sigma_ell(b^{-1}, ..., b^{-1}) from
// the reciprocal of the moment germ. alpha must come out self-adjoint
// (NonSelfAdjointAlpha otherwise); validity records positivity of the sigma
// family Gram matrix, the moment condition for the representing measure.
NevanlinnaRep nevanlinna_extract(const Distribution& mu, double tol = 1e-10);

LevelMatrix nevanlinna_f_eval(const NevanlinnaRep& rep, const LevelMatrix& b);

// Domain threshold ||r(0)|| + C0 + delta for the large-argument fixed-point
// domain: C0 controls the coefficient growth of r, delta bounds the series
// on spectrum_floor(b) >= C0.
double large_domain_constant(const NCSeries& r);

struct VoiculescuReport {
  Sigma0Report sigma0;
  double div_gram_min_eig = 0.0;
  // Max residual of voiculescu_eval against the given series at samples.
  double phi_residual = 0.0;
  bool pass = false;
};

struct VoiculescuCertification {
  VoiculescuReport report;
  std::optional<Distribution> mu;
};

// Decides whether phi is the Voiculescu transform of an infinitely divisible
// Sigma_0 distribution: coefficients must be adjoint-symmetric
// (SelfAdjointnessViolated otherwise), the candidate built from cumulants =
// coefficients must certify as Sigma_0, its cumulant family must pass the
// divisibility Gram test, and phi must reproduce through F-inversion at
// sample points.
VoiculescuCertification certify_voiculescu(const NCSeries& phi, int D, double tol = 1e-8);

}  // namespace freeprob
