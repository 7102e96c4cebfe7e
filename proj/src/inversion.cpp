#include "freeprob/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <utility>

#include "freeprob/divisibility.hpp"
#include "freeprob/errors.hpp"
#include "freeprob/transforms.hpp"

namespace freeprob {

NCMap map_from_series(NCSeries s) {
  auto shared = std::make_shared<const NCSeries>(std::move(s));
  NCMap m;
  m.eval = [shared](const LevelMatrix& x) { return eval(*shared, x); };
  m.deriv = [shared](const LevelMatrix& x, const LevelMatrix& E) {
    LevelMatrix acc(x.d, x.n);
    for (int ell = 1; ell <= shared->L; ++ell)
      acc = acc + apply_level_deriv(shared->coeffs[std::size_t(ell)], x, E);
    return acc;
  };
  return m;
}

NCMap map_from_function(std::function<LevelMatrix(const LevelMatrix&)> f) {
  auto shared = std::make_shared<const std::function<LevelMatrix(const LevelMatrix&)>>(std::move(f));
  NCMap m;
  m.eval = [shared](const LevelMatrix& x) { return (*shared)(x); };
  m.deriv = [shared](const LevelMatrix& x, const LevelMatrix& E) {
    // Average over fourth roots of unity: kills all Taylor terms except the
    // linear one through order four, and the value term cancels exactly.
    const double hstep = 1e-8;
    const Complex roots[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    LevelMatrix acc(x.d, x.n);
    for (int k = 0; k < 4; ++k) {
      LevelMatrix xs = x;
      xs.mat += hstep * roots[k] * E.mat;
      const LevelMatrix fx = (*shared)(xs);
      acc.mat += std::conj(roots[k]) * fx.mat;
    }
    acc.mat /= 4.0 * hstep;
    return acc;
  };
  return m;
}

NCMap f_map_from_distribution(const Distribution& mu) {
  const NCSeries h = h_series_from_moments(mu);
  auto r = std::make_shared<const NCSeries>(mult_inverse(h));
  NCMap m;
  m.eval = [r](const LevelMatrix& w) { return w + eval(*r, inverse(w)); };
  m.deriv = [r](const LevelMatrix& w, const LevelMatrix& E) {
    const LevelMatrix winv = inverse(w);
    LevelMatrix dinv(w.d, w.n);
    dinv.mat = -winv.mat * E.mat * winv.mat;
    LevelMatrix acc = E;
    for (int ell = 1; ell <= r->L; ++ell)
      acc = acc + apply_level_deriv(r->coeffs[std::size_t(ell)], winv, dinv);
    return acc;
  };
  return m;
}

LevelMatrix earle_hamilton(const std::function<LevelMatrix(const LevelMatrix&)>& phi,
                           const LevelMatrix& b, double tol, int max_iter, int* iterations) {
  LevelMatrix w = b;
  double first_step = 0.0, prev_step = std::numeric_limits<double>::infinity();
  int growing = 0;
  for (int it = 1; it <= max_iter; ++it) {
    if (iterations) *iterations = it;
    LevelMatrix phw(b.d, b.n);
    try {
      phw = phi(w);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NumericDomain)
        throw NoContraction("iterate left the domain of the transform");
      throw;
    }
    const LevelMatrix next = b - phw;
    const double step = op_norm(Matrix(next.mat - w.mat));
    w = next;
    if (step <= tol * (1.0 + op_norm(w.mat))) return w;
    if (it == 1) first_step = step;
    if (step > prev_step * (1.0 + 1e-12)) {
      if (++growing >= 3 && step > 4.0 * std::max(first_step, tol))
        throw NoContraction("fixed point iteration diverges");
    } else {
      growing = 0;
    }
    prev_step = step;
  }
  throw MaxIterations("fixed point iteration did not settle");
}

namespace {

Matrix jacobian(const NCMap& f, const LevelMatrix& x) {
  const int nd = x.d * x.n;
  const Eigen::Index N = Eigen::Index(nd) * nd;
  Matrix J(N, N);
  LevelMatrix E(x.d, x.n);
  for (Eigen::Index beta = 0; beta < N; ++beta) {
    E.mat = matrix_unit(int(beta), nd);
    J.col(beta) = vec(f.deriv(x, E).mat);
  }
  return J;
}

}  // namespace

NewtonResult newton_invert(const NCMap& f, const LevelMatrix& target, const LevelMatrix& x0,
                           double tol, int max_iter) {
  if (target.d != x0.d || target.n != x0.n) throw DimensionMismatch("newton_invert shapes");
  const int nd = x0.d * x0.n;
  const Matrix J0 = jacobian(f, x0);
  Eigen::FullPivLU<Matrix> lu(J0);
  if (!lu.isInvertible()) throw SingularDerivative("derivative at the starting point");

  NewtonResult out{x0, x0, {}};
  KantorovichCertificate& cert = out.cert;
  const Vector f0 = vec(Matrix(f.eval(x0).mat - target.mat));
  const Vector step0 = lu.solve(f0);
  cert.eta = step0.norm();
  out.first_iterate.mat = x0.mat - unvec(step0, nd);

  // Lipschitz constant of J0^{-1} J through a Schwarz-type bound: sampled
  // sup of ||J0^{-1} J - Id|| on spheres of radius r gives the Lipschitz
  // bound 2 sup / (r - 2 sigma) on the inner ball of radius sigma that
  // contains the Newton trajectory. Each admissible radius gives a valid
  // bound; keep the smallest.
  const double sigma = 3.0 * cert.eta;
  if (cert.eta > 0.0) {
    std::mt19937_64 rng(0x6b43a9b5eceb3157ULL);
    std::normal_distribution<double> g;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 4; ++j) {
      const double radius = sigma * (4 << j);
      double sup = 0.0;
      bool usable = true;
      for (int s = 0; s < 6 && usable; ++s) {
        Matrix dir(nd, nd);
        for (int p = 0; p < nd; ++p)
          for (int q = 0; q < nd; ++q) dir(p, q) = Complex(g(rng), g(rng));
        dir *= radius / dir.norm();
        LevelMatrix xs = x0;
        xs.mat += dir;
        try {
          const Matrix A = lu.solve(jacobian(f, xs));
          sup = std::max(sup, op_norm(Matrix(A - Matrix::Identity(A.rows(), A.cols()))));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NumericDomain) throw;
          usable = false;
        }
      }
      if (usable) best = std::min(best, 2.0 * sup / (radius - 2.0 * sigma));
    }
    if (std::isfinite(best)) cert.K = best;
  }

  cert.h = cert.K * cert.eta;
  if (cert.h > 0.5) throw CertificateFailed("Kantorovich bound h exceeds 1/2");
  const double disc = std::sqrt(1.0 - 2.0 * cert.h);
  cert.t_star = 2.0 * cert.eta / (1.0 + disc);
  cert.t_star_star =
      cert.K > 0.0 ? (1.0 + disc) / cert.K : std::numeric_limits<double>::infinity();

  const double scale = std::max(1.0, target.mat.norm());
  LevelMatrix x = x0;
  for (int it = 0; it <= max_iter; ++it) {
    const Vector res = vec(Matrix(f.eval(x).mat - target.mat));
    if (res.norm() <= tol * scale) {
      out.root = x;
      cert.converged = true;
      cert.iterations = it;
      return out;
    }
    Eigen::FullPivLU<Matrix> lux(it == 0 ? J0 : jacobian(f, x));
    if (!lux.isInvertible()) throw SingularDerivative("derivative became singular");
    x.mat -= unvec(Vector(lux.solve(res)), nd);
  }
  throw MaxIterations("Newton iteration did not reach the tolerance");
}

NCSeries r_series(const Distribution& mu) {
  if (static_cast<int>(mu.cumulants.size()) < mu.L)
    throw InsufficientOrder("R series needs cumulants to the stated order");
  NCSeries s(mu.d, std::max(mu.L - 1, 0));
  for (int ell = 0; ell <= s.L; ++ell) s.coeffs[std::size_t(ell)] = mu.cumulants[std::size_t(ell)];
  return s;
}

std::vector<MultilinearMap> cumulants_via_series_inversion(const Distribution& mu) {
  const NCSeries h = h_series_from_moments(mu);
  const NCSeries k = comp_inverse(h);
  const NCSeries r = mult_inverse(k);
  return r.coeffs;
}

LevelMatrix voiculescu_eval(const Distribution& mu, const LevelMatrix& b, double tol) {
  const NCMap F = f_map_from_distribution(mu);
  const NewtonResult res = newton_invert(F, b, b, tol);
  return res.root - b;
}

NevanlinnaRep nevanlinna_extract(const Distribution& mu, double tol) {
  if (mu.L < 2) throw InsufficientOrder("expansion needs moments past the mean");
  const NCSeries h = h_series_from_moments(mu);
  const NCSeries r = mult_inverse(h);
  NevanlinnaRep rep;
  rep.d = mu.d;
  const Matrix a0 = -r.coeffs[0].constant_value();
  if (!is_self_adjoint(a0, std::max(tol, 1e-10)))
    throw NonSelfAdjointAlpha("mean term of the expansion");
  rep.alpha = (a0 + Matrix(a0.adjoint())) / 2.0;
  rep.sigma.reserve(std::size_t(r.L));
  for (int ell = 1; ell <= r.L; ++ell) {
    MultilinearMap sig = r.coeffs[std::size_t(ell)];
    sig.op *= -1.0;
    rep.sigma.push_back(std::move(sig));
  }

  // Positivity of the sigma family over monomials is the moment condition
  // for the representing measure.
  const int D = (r.L - 1) / 2;
  std::vector<MultilinearMap> by_arity(std::size_t(2 * D) + 2);
  for (int a = 1; a <= 2 * D + 1; ++a) by_arity[std::size_t(a)] = rep.sigma[std::size_t(a) - 1];
  Matrix G = assemble_gram(mu.d, monomial_basis(mu.d, D, true), pattern_from_outer_maps(by_arity));
  G = (G + Matrix(G.adjoint())) / 2.0;
  rep.gram_min_eig = min_eig_hermitian(G);
  rep.valid = rep.gram_min_eig >= -tol;
  return rep;
}

LevelMatrix nevanlinna_f_eval(const NevanlinnaRep& rep, const LevelMatrix& b) {
  const LevelMatrix binv = inverse(b);
  LevelMatrix acc = b;
  acc.mat -= amplify(rep.alpha, b.n).mat;
  for (const MultilinearMap& sig : rep.sigma) acc = acc - apply_level(sig, binv);
  return acc;
}

double large_domain_constant(const NCSeries& r) {
  const double b0 = r.coeffs.empty() ? 0.0 : op_norm(r.coeffs[0].constant_value());
  double c0 = 1.0;
  for (int ell = 1; ell <= r.L; ++ell) {
    const double rho = r.coeffs[std::size_t(ell)].norm();
    if (rho > 0.0) c0 = std::max(c0, 2.0 * std::pow(rho, 1.0 / ell));
  }
  if (r.tail_bound) c0 = std::max(c0, 2.0 * *r.tail_bound);
  double delta = 0.0;
  for (int ell = 1; ell <= r.L; ++ell)
    delta += r.coeffs[std::size_t(ell)].norm() * std::pow(c0, -ell);
  if (r.tail_bound && *r.tail_bound > 0.0) {
    const double q = *r.tail_bound / c0;
    delta += std::pow(q, r.L + 1) / ((1.0 - q) * *r.tail_bound);
  }
  return b0 + c0 + delta;
}

VoiculescuCertification certify_voiculescu(const NCSeries& phi, int D, double tol) {
  for (int ell = 0; ell <= phi.L; ++ell) {
    const MultilinearMap& c = phi.coeffs[std::size_t(ell)];
    const double dev = op_norm(Matrix(rev_adjoint(c).op - c.op));
    if (dev > std::max(tol, 1e-10) * (1.0 + c.norm()))
      throw SelfAdjointnessViolated("transform coefficients must be adjoint-symmetric");
  }

  Distribution cand;
  cand.d = phi.d;
  cand.L = phi.L + 1;
  cand.cumulants = phi.coeffs;
  cand.moments = moments_from_cumulants(cand.cumulants, cand.L);
  cand.M = empirical_bound(cand.moments);

  VoiculescuCertification out;
  VoiculescuReport& rep = out.report;
  rep.sigma0 = certify_sigma0(cand, D, std::max(tol, 1e-10));
  const DivisibilityReport div = is_infinitely_divisible(cand, D, std::max(tol, 1e-10));
  rep.div_gram_min_eig = div.gram_min_eig;

  // The given series must reproduce through inversion of the induced F.
  const double floor = 20.0 * std::max(1.0, cand.M);
  double resid = 0.0;
  for (int j = 0; j < 5; ++j) {
    LevelMatrix b = LevelMatrix::scalar(Complex(0.0, floor * (1.0 + 0.1 * j)), phi.d);
    if (j == 2 && phi.d > 1) b.mat(0, 0) += Complex(0.3 * floor, 0.2 * floor);
    const LevelMatrix via_inv = voiculescu_eval(cand, b);
    const LevelMatrix via_series = eval(phi, inverse(b));
    resid = std::max(resid, op_norm(Matrix(via_inv.mat - via_series.mat)));
  }
  rep.phi_residual = resid;

  rep.pass = rep.sigma0.pass && div.pass && resid <= std::max(1e-6, 100.0 * tol);
  if (rep.pass) out.mu = std::move(cand);
  return out;
}

}  // namespace freeprob
