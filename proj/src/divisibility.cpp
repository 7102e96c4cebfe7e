#include "freeprob/divisibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "freeprob/errors.hpp"
#include "freeprob/inversion.hpp"

namespace freeprob {

Matrix choi_matrix(const CPMap& rho) {
  const int d = rho.d;
  Matrix C(Eigen::Index(d) * d, Eigen::Index(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      C.block(Eigen::Index(i) * d, Eigen::Index(j) * d, d, d) =
          unvec(rho.op.col(Eigen::Index(j) * d + i), d);
  return C;
}

bool is_completely_positive(const CPMap& rho, double tol, double* min_eig) {
  const Matrix C = choi_matrix(rho);
  const double herm_dev = op_norm(Matrix(C - Matrix(C.adjoint())));
  const Matrix H = (C + Matrix(C.adjoint())) / 2.0;
  const double lo = min_eig_hermitian(H);
  if (min_eig) *min_eig = lo;
  return herm_dev <= tol * (1.0 + op_norm(C)) && lo >= -tol;
}

Distribution convolve(const Distribution& a, const Distribution& b) {
  if (a.d != b.d) throw DimensionMismatch("convolution of different base algebras");
  const int L = std::min(a.L, b.L);
  if (static_cast<int>(a.cumulants.size()) < L || static_cast<int>(b.cumulants.size()) < L)
    throw InsufficientOrder("convolution needs cumulants to the shared order");
  std::vector<MultilinearMap> cums;
  cums.reserve(std::size_t(L));
  for (int ell = 0; ell < L; ++ell) {
    MultilinearMap c = a.cumulants[std::size_t(ell)];
    c.op += b.cumulants[std::size_t(ell)].op;
    cums.push_back(std::move(c));
  }
  Distribution out;
  out.d = a.d;
  out.L = L;
  out.moments = moments_from_cumulants(cums, L);
  out.cumulants = std::move(cums);
  out.M = a.M + b.M;
  return out;
}

DivisibilityReport is_infinitely_divisible(const Distribution& mu, int D, double tol) {
  if (D < 1) throw InsufficientOrder("divisibility test needs degree >= 1");
  if (2 * D > mu.L)
    throw InsufficientOrder("divisibility Gram needs cumulants to twice the degree");
  const PatternValue value = pattern_from_interior_maps(mu.cumulants, mu.d);
  Matrix G = assemble_gram(mu.d, monomial_basis(mu.d, D, false), value);
  G = (G + Matrix(G.adjoint())) / 2.0;
  DivisibilityReport rep;
  rep.gram_min_eig = min_eig_hermitian(G);
  rep.pass = rep.gram_min_eig >= -tol;
  return rep;
}

Distribution semigroup_apply(const Distribution& mu, const CPMap& rho, int D, double tol) {
  if (rho.d != mu.d) throw DimensionMismatch("semigroup map base dimension");
  if (!is_completely_positive(rho, tol))
    throw NotCP("semigroup action needs a completely positive map");
  if (!is_infinitely_divisible(mu, D, tol).pass)
    throw NotInfinitelyDivisible("semigroup action needs an infinitely divisible base");
  std::vector<MultilinearMap> cums;
  cums.reserve(mu.cumulants.size());
  for (const MultilinearMap& c : mu.cumulants) cums.push_back(out_transform(rho.op, c));
  Distribution out;
  out.d = mu.d;
  out.L = mu.L;
  out.moments = moments_from_cumulants(cums, mu.L);
  out.cumulants = std::move(cums);
  out.M = empirical_bound(out.moments);
  return out;
}

Distribution convolution_root(const Distribution& mu, int k, int D, double tol) {
  if (k <= 0) throw DomainError("root index must be positive");
  return semigroup_apply(mu, CPMap::scaled_identity(1.0 / k, mu.d), D, tol);
}

PhiExtensionReport phi_extension_check(const Distribution& mu,
                                       const std::vector<LevelMatrix>& points, double tol) {
  const NCSeries r = r_series(mu);

  // Growth rate of the trailing half of the cumulant coefficients. Zero
  // trailing coefficients mean the series is a polynomial, its own
  // analytic extension, and the tail bound below vanishes identically.
  double growth = 0.0;
  for (int ell = r.L / 2 + 1; ell <= r.L; ++ell) {
    const double nc = op_norm(r.coeffs[std::size_t(ell)].op);
    if (nc > 0.0) growth = std::max(growth, std::pow(nc, 1.0 / ell));
  }

  PhiExtensionReport rep;
  rep.rows.reserve(points.size());
  for (const LevelMatrix& b : points) {
    PhiExtensionRow row;
    row.spectrum_floor = spectrum_floor(b);
    try {
      const LevelMatrix binv = inverse(b);
      const LevelMatrix phi = eval(r, binv);
      const double q = op_norm(binv.mat) * growth;
      row.tail = q < 1.0 ? std::pow(q, r.L + 1) / (1.0 - q)
                         : std::numeric_limits<double>::infinity();
      row.certified = row.tail <= std::max(tol, 1e-12);
      row.phi_margin = -min_eig_hermitian(Matrix(-imag_part(phi).mat));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NumericDomain && e.kind() != ErrorKind::Precondition) throw;
      row.certified = false;
    }
    if (row.certified) ++rep.certified_count;
    rep.rows.push_back(row);
  }
  rep.all_certified = rep.certified_count == static_cast<int>(rep.rows.size()) &&
                      std::all_of(rep.rows.begin(), rep.rows.end(), [tol](const PhiExtensionRow& r) {
                        return !r.certified || r.phi_margin <= tol;
                      });
  return rep;
}

}  // namespace freeprob
