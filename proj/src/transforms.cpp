#include "freeprob/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "freeprob/errors.hpp"

namespace freeprob {

LevelMatrix cauchy_eval_realization(const Realization& r, const LevelMatrix& b) {
  return realization_resolvent(r, b);
}

SeriesValue cauchy_eval_series(const Distribution& mu, const LevelMatrix& b) {
  if (b.d != mu.d) throw DimensionMismatch("cauchy_eval_series");
  LevelMatrix binv(b.d, b.n);
  try {
    binv = inverse(b);
  } catch (const SingularValue&) {
    throw OutsideConvergence("series argument must be invertible");
  }
  const double nb = op_norm(binv.mat);
  const double q = nb * mu.M;
  if (q >= 1.0) throw OutsideConvergence("series needs ||b^{-1}|| M < 1");
  LevelMatrix acc = binv;
  for (int k = 1; k <= mu.L; ++k)
    acc = acc + binv * apply_level(mu.moments[std::size_t(k) - 1], binv) * binv;
  const double tail = nb * std::pow(q, mu.L + 1) / (1.0 - q);
  return {std::move(acc), tail};
}

LevelMatrix cauchy_eval(const Distribution& mu, const LevelMatrix& b) {
  if (mu.exact_resolvent && half_plane_margin(b) > 0.0) return mu.exact_resolvent(b);
  return cauchy_eval_series(mu, b).value;
}

LevelMatrix f_transform_eval(const Distribution& mu, const LevelMatrix& b, double tol) {
  const bool exact = bool(mu.exact_resolvent) && half_plane_margin(b) > 0.0;
  LevelMatrix G(b.d, b.n);
  double tail = 0.0;
  if (exact) {
    G = mu.exact_resolvent(b);
  } else {
    SeriesValue sv = cauchy_eval_series(mu, b);
    G = std::move(sv.value);
    tail = sv.tail;
  }
  LevelMatrix F = inverse(G);
  // Truncation error on G of size tail inflates to roughly ||F||^2 tail on F.
  double slack = tol;
  const double nf = op_norm(F.mat);
  if (nf * tail < 0.5)
    slack += 2.0 * nf * nf * tail;
  else if (tail > 0.0)
    slack = std::numeric_limits<double>::infinity();
  if (half_plane_margin(F) < half_plane_margin(b) - slack)
    throw DomainError("F transform lost imaginary part beyond tolerance");
  return F;
}

NCSeries h_series_from_moments(const Distribution& mu) {
  if (static_cast<int>(mu.moments.size()) < mu.L)
    throw InsufficientOrder("h series needs moments to the stated order");
  NCSeries s(mu.d, mu.L + 1);
  s.coeffs[1] = MultilinearMap::identity(mu.d);
  for (int ell = 2; ell <= mu.L + 1; ++ell)
    s.coeffs[std::size_t(ell)] = sandwich(mu.moments[std::size_t(ell) - 2]);
  s.tail_bound = mu.M;
  return s;
}

AsymptoticsReport asymptotics_check(const std::function<LevelMatrix(const LevelMatrix&)>& g,
                                    const Matrix& Q, const std::vector<double>& y_grid,
                                    double tol) {
  const int d = static_cast<int>(Q.rows());
  AsymptoticsReport rep;
  rep.rows.reserve(y_grid.size());
  const Matrix id = Matrix::Identity(d, d);
  for (double y : y_grid) {
    LevelMatrix b(d, 1);
    b.mat = Complex(0.0, y) * Q;
    const LevelMatrix val = g(b);
    rep.rows.push_back({y, op_norm(Matrix(b.mat * val.mat - id))});
  }
  rep.pass = !rep.rows.empty() && rep.rows.back().residual < tol;
  if (rep.rows.size() >= 2)
    rep.pass = rep.pass &&
               rep.rows.back().residual <= rep.rows[rep.rows.size() - 2].residual + 1e-12;
  return rep;
}

LevelMatrix counterexample_H(const LevelMatrix& b) {
  if (b.d != 2) throw DimensionMismatch("counterexample lives over M_2");
  static const Distribution mu = fixture("independent_diagonal", FixtureParams{2, 2});
  return b - f_transform_eval(mu, b);
}

NCSeries counterexample_K_series(int L) {
  Distribution mu;
  mu.d = 2;
  mu.L = L + 1;
  mu.moments = independent_diagonal_moments(L + 1);
  mu.M = 2.0;
  const NCSeries h = h_series_from_moments(mu);
  return scale(-1.0, mult_inverse(h));
}

CauchyCertification certify_cauchy(const NCOracle& h, int d, int L, int D, double tol) {
  if (L < 1 || D < 1) throw InsufficientOrder("certification needs L >= 1 and D >= 1");
  const int A = std::max(L + 1, 2 * D + 1);
  const NCSeries T = extract_coefficients(h, d, A);
  const double eff = std::max(tol, 1e-12);
  if (T.coeffs[0].norm() > eff)
    throw NotNormalized("candidate transform must vanish at 0");

  CauchyCertification out;
  CauchyReport& rep = out.report;
  rep.identity_residual =
      op_norm(Matrix(T.coeffs[1].op - Matrix::Identity(Eigen::Index(d) * d, Eigen::Index(d) * d)));
  rep.identity_ok = rep.identity_residual <= eff;

  // Interior moment candidates come from peeling the forced outer slots off
  // each coefficient; the peel residual measures failure of that form.
  std::vector<MultilinearMap> moments;
  moments.reserve(std::size_t(A) - 1);
  double bim = 0.0;
  for (int k = 2; k <= A; ++k) {
    double left_res = 0.0, right_res = 0.0;
    MultilinearMap inner = strip_right(strip_left(T.coeffs[std::size_t(k)], &left_res), &right_res);
    bim = std::max(bim, std::max(left_res, right_res));
    moments.push_back(std::move(inner));
  }
  rep.bimodular_residual = bim;
  rep.bound_M = empirical_bound(moments);

  std::vector<MultilinearMap> outer(std::size_t(2 * D) + 2);
  for (int a = 1; a <= 2 * D + 1; ++a) outer[std::size_t(a)] = T.coeffs[std::size_t(a)];
  Matrix G = assemble_gram(d, monomial_basis(d, D, true), pattern_from_outer_maps(outer));
  G = (G + Matrix(G.adjoint())) / 2.0;
  rep.gram_min_eig = min_eig_hermitian(G);

  rep.pass = rep.identity_ok && rep.gram_min_eig >= -eff && rep.bimodular_residual <= 100.0 * eff;
  if (rep.pass) {
    Distribution mu;
    mu.d = d;
    mu.L = A - 1;
    mu.cumulants = cumulants_from_moments(moments, mu.L);
    mu.moments = std::move(moments);
    mu.M = rep.bound_M;
    out.mu = std::move(mu);
  }
  return out;
}

CauchyCertification certify_cauchy(const NCSeries& h, int D, double tol) {
  if (2 * D + 1 > h.L)
    throw InsufficientOrder("series degree below the Gram window");
  return certify_cauchy(series_oracle(h), h.d, h.L - 1, D, tol);
}

std::vector<DensityRow> stieltjes_density(const Distribution& mu, const std::vector<double>& xs,
                                          double y, int workers) {
  if (y <= 0.0) throw DomainError("regularization height must be positive");
  const int n = static_cast<int>(xs.size());
  std::vector<DensityRow> out(static_cast<std::size_t>(n));
  std::exception_ptr err;
  std::mutex err_mx;
  auto run = [&](int lo, int hi) {
    try {
      for (int i = lo; i < hi; ++i) {
        const LevelMatrix b = LevelMatrix::scalar(Complex(xs[std::size_t(i)], y), mu.d);
        const LevelMatrix G = cauchy_eval(mu, b);
        out[std::size_t(i)] = {xs[std::size_t(i)], -G.mat.trace().imag() / (M_PI * mu.d)};
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lk(err_mx);
      if (!err) err = std::current_exception();
    }
  };
  const int W = std::clamp(workers, 1, std::max(1, n));
  if (W <= 1) {
    run(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + W - 1) / W;
    for (int w = 0; w < W; ++w) {
      const int lo = w * chunk, hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace freeprob
