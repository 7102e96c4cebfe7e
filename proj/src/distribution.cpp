#include "freeprob/distribution.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <map>
#include <random>

#include "freeprob/ncpartition.hpp"

namespace freeprob {

Matrix realization_embed(const Realization& r, const Matrix& b) {
  if (b.rows() != r.d || b.cols() != r.d) throw DimensionMismatch("realization_embed");
  return Eigen::kroneckerProduct(b, Matrix::Identity(r.m, r.m));
}

Matrix realization_expect(const Realization& r, const Matrix& A) {
  const int d = r.d, m = r.m;
  if (A.rows() != d * m || A.cols() != d * m) throw DimensionMismatch("realization_expect");
  Matrix out(d, d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) out(p, q) = A.block(p * m, q * m, m, m).trace() / double(m);
  return out;
}

LevelMatrix realization_resolvent(const Realization& r, const LevelMatrix& b) {
  if (b.d != r.d) throw DimensionMismatch("realization_resolvent");
  const int d = r.d, m = r.m, n = b.n, dm = d * m;
  Matrix big = Matrix::Zero(Eigen::Index(n) * dm, Eigen::Index(n) * dm);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      big.block(Eigen::Index(i) * dm, Eigen::Index(j) * dm, dm, dm) =
          realization_embed(r, b.block(i, j));
    big.block(Eigen::Index(i) * dm, Eigen::Index(i) * dm, dm, dm) -= r.a;
  }
  Eigen::FullPivLU<Matrix> lu(big);
  if (!lu.isInvertible()) throw SingularResolvent("realization resolvent does not exist here");
  const Matrix res = lu.inverse();
  LevelMatrix out(d, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.mat.block(Eigen::Index(i) * d, Eigen::Index(j) * d, d, d) = realization_expect(
          r, res.block(Eigen::Index(i) * dm, Eigen::Index(j) * dm, dm, dm));
  return out;
}

std::vector<MultilinearMap> moments_from_realization(const Realization& r, int L) {
  const int d = r.d, d2 = d * d;
  std::vector<Matrix> unit_emb(d2);
  for (int s = 0; s < d2; ++s) unit_emb[s] = realization_embed(r, matrix_unit(s, d));
  std::vector<MultilinearMap> out;
  out.reserve(L);
  for (int k = 0; k < L; ++k) {
    MultilinearMap T(d, k);
    Eigen::Index idx = 0;
    // Depth-first over unit tuples, sharing the product prefix a e_{s_1} a ...
    std::function<void(int, const Matrix&)> walk = [&](int depth, const Matrix& prod) {
      if (depth == k) {
        T.op.col(idx++) = vec(realization_expect(r, prod));
        return;
      }
      for (int s = 0; s < d2; ++s) walk(depth + 1, Matrix(prod * unit_emb[s] * r.a));
    };
    walk(0, r.a);
    out.push_back(std::move(T));
  }
  return out;
}

namespace {

// Nested cumulant evaluation of a non-crossing partition over an interval of
// X positions, as a multilinear map in the arguments between those X's.
// The block containing the left endpoint supplies the outer cumulant; each
// gap between consecutive block elements evaluates recursively and lands,
// framed by its neighbouring arguments, in the matching cumulant slot. A
// tail after the last block element splits off as a right factor.
MultilinearMap kappa_interval(const Partition& pi, const std::vector<MultilinearMap>& cums,
                              int d, int lo, int hi) {
  const std::vector<int>& V = pi.blocks[pi.block_of[lo]];
  const int r = static_cast<int>(V.size());
  if (r > static_cast<int>(cums.size()))
    throw InsufficientOrder("cumulant order exceeds available data");
  std::vector<MultilinearMap> owned;
  owned.reserve(r - 1);
  for (int i = 1; i < r; ++i) {
    if (V[i] == V[i - 1] + 1)
      owned.push_back(MultilinearMap::identity(d));
    else
      owned.push_back(sandwich(kappa_interval(pi, cums, d, V[i - 1] + 1, V[i] - 1)));
  }
  std::vector<const MultilinearMap*> parts;
  parts.reserve(owned.size());
  for (const auto& p : owned) parts.push_back(&p);
  MultilinearMap T = compose_slots(cums[r - 1], parts);
  if (V.back() < hi)
    T = concat_product(T, sandwich_left(kappa_interval(pi, cums, d, V.back() + 1, hi)));
  return T;
}

}  // namespace

std::vector<MultilinearMap> moments_from_cumulants(const std::vector<MultilinearMap>& cums,
                                                   int L) {
  if (static_cast<int>(cums.size()) < L)
    throw InsufficientOrder("need cumulants to the requested order");
  const int d = cums.empty() ? 1 : cums[0].d;
  std::vector<MultilinearMap> moms;
  moms.reserve(L);
  for (int k = 0; k < L; ++k) {
    MultilinearMap acc(d, k);
    for (const Partition& pi : nc_partitions(k + 1))
      acc.op += kappa_interval(pi, cums, d, 0, k).op;
    moms.push_back(std::move(acc));
  }
  return moms;
}

std::vector<MultilinearMap> cumulants_from_moments(const std::vector<MultilinearMap>& moms,
                                                   int L) {
  if (static_cast<int>(moms.size()) < L)
    throw InsufficientOrder("need moments to the requested order");
  const int d = moms.empty() ? 1 : moms[0].d;
  std::vector<MultilinearMap> cums;
  cums.reserve(L);
  for (int n = 1; n <= L; ++n) {
    const int k = n - 1;
    MultilinearMap c(d, k, moms[k].op);
    for (const Partition& pi : nc_partitions(n)) {
      if (pi.blocks.size() == 1) continue;
      c.op -= kappa_interval(pi, cums, d, 0, k).op;
    }
    cums.push_back(std::move(c));
  }
  return cums;
}

Matrix moment_word(const Distribution& mu, const std::vector<Matrix>& outer_word) {
  if (outer_word.empty()) throw DimensionMismatch("moment_word needs at least one argument");
  const int n = static_cast<int>(outer_word.size()) - 1;
  if (n == 0) return outer_word[0];
  if (n > static_cast<int>(mu.moments.size()))
    throw InsufficientOrder("word length exceeds moment order");
  std::vector<Matrix> inner(outer_word.begin() + 1, outer_word.end() - 1);
  return outer_word.front() * mu.moments[n - 1].apply(inner) * outer_word.back();
}

double empirical_bound(const std::vector<MultilinearMap>& moments, std::uint64_t seed,
                       int trials) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> g;
  double best = 0.0;
  for (std::size_t k = 0; k < moments.size(); ++k) {
    const MultilinearMap& T = moments[k];
    const int d = T.d, n_x = static_cast<int>(k) + 1;
    auto probe = [&](const std::vector<Matrix>& args) {
      const double v = op_norm(T.apply(args));
      if (v > 0.0) best = std::max(best, std::pow(v, 1.0 / n_x));
    };
    probe(std::vector<Matrix>(k, Matrix::Identity(d, d)));
    for (int t = 0; t < trials; ++t) {
      std::vector<Matrix> args;
      args.reserve(k);
      for (std::size_t j = 0; j < k; ++j) {
        Matrix Z(d, d);
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q) Z(p, q) = Complex(g(rng), g(rng));
        args.push_back(Z / op_norm(Z));
      }
      probe(args);
    }
  }
  return best;
}

std::vector<Monomial> monomial_basis(int d, int D, bool include_constant) {
  std::vector<Monomial> basis;
  if (include_constant) basis.push_back({});
  const int d2 = d * d;
  for (int k = 1; k <= D; ++k) {
    std::vector<int> u(k, 0);
    for (;;) {
      basis.push_back({u});
      int p = k - 1;
      while (p >= 0 && ++u[p] == d2) u[p--] = 0;
      if (p < 0) break;
    }
  }
  return basis;
}

namespace {

SparseElem sparse_unit(int alpha) { return {{alpha, Complex(1.0, 0.0)}}; }

SparseElem sparse_identity(int d) {
  SparseElem e;
  for (int i = 0; i < d; ++i) e.emplace_back(i * d + i, Complex(1.0, 0.0));
  return e;
}

SparseElem sparse_adjoint(const SparseElem& a, int d) {
  SparseElem out;
  out.reserve(a.size());
  for (const auto& [alpha, z] : a) out.emplace_back((alpha % d) * d + alpha / d, std::conj(z));
  return out;
}

SparseElem sparse_mul(const SparseElem& a, const SparseElem& b, int d) {
  std::map<int, Complex> acc;
  for (const auto& [alpha, za] : a)
    for (const auto& [beta, zb] : b) {
      // e_alpha = E(alpha%d, alpha/d); product is nonzero iff columns meet rows.
      if (alpha / d != beta % d) continue;
      acc[(beta / d) * d + (alpha % d)] += za * zb;
    }
  SparseElem out;
  for (const auto& [idx, z] : acc)
    if (z != 0.0) out.emplace_back(idx, z);
  return out;
}

Matrix densify(const SparseElem& a, int d) {
  Matrix m = Matrix::Zero(d, d);
  for (const auto& [alpha, z] : a) m(alpha % d, alpha / d) += z;
  return m;
}

}  // namespace

Matrix assemble_gram(int d, const std::vector<Monomial>& basis, const PatternValue& value) {
  const auto N = static_cast<Eigen::Index>(basis.size());
  const SparseElem one = sparse_identity(d);
  Matrix G(N * d, N * d);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto& ui = basis[i].units;
    const int ki = static_cast<int>(ui.size());
    for (Eigen::Index j = 0; j < N; ++j) {
      const auto& uj = basis[j].units;
      const int kj = static_cast<int>(uj.size());
      const int m = ki + kj;
      SparseElem left = one, right = one;
      std::vector<SparseElem> interior;
      interior.reserve(m > 0 ? m - 1 : 0);
      if (ki == 0 && kj == 0) {
        // value(1) alone
      } else if (ki == 0) {
        left = sparse_unit(uj[0]);
        for (int t = 1; t < kj; ++t) interior.push_back(sparse_unit(uj[t]));
      } else if (kj == 0) {
        for (int t = 1; t < ki; ++t) interior.push_back(sparse_adjoint(sparse_unit(ui[ki - t]), d));
        right = sparse_adjoint(sparse_unit(ui[0]), d);
      } else {
        for (int t = 1; t < ki; ++t) interior.push_back(sparse_adjoint(sparse_unit(ui[ki - t]), d));
        interior.push_back(sparse_mul(sparse_adjoint(sparse_unit(ui[0]), d), sparse_unit(uj[0]), d));
        for (int t = 1; t < kj; ++t) interior.push_back(sparse_unit(uj[t]));
      }
      G.block(i * d, j * d, d, d) = value(m, left, interior, right);
    }
  }
  return G;
}

PatternValue pattern_from_interior_maps(std::vector<MultilinearMap> maps, int d) {
  return [d, maps = std::move(maps)](int m, const SparseElem& left,
                                     const std::vector<SparseElem>& interior,
                                     const SparseElem& right) -> Matrix {
    if (m == 0) return densify(sparse_mul(left, right, d), d);
    if (m > static_cast<int>(maps.size()))
      throw InsufficientOrder("pattern needs interior maps beyond the stored order");
    const Matrix mid = apply_sparse(maps[m - 1], interior);
    return densify(left, d) * mid * densify(right, d);
  };
}

PatternValue pattern_from_distribution(const Distribution& mu) {
  return pattern_from_interior_maps(mu.moments, mu.d);
}

PatternValue pattern_from_outer_maps(const std::vector<MultilinearMap>& maps_by_arity) {
  const auto maps = maps_by_arity;
  return [maps](int m, const SparseElem& left, const std::vector<SparseElem>& interior,
                const SparseElem& right) -> Matrix {
    if (m + 1 >= static_cast<int>(maps.size()))
      throw InsufficientOrder("pattern needs coefficients beyond the extracted order");
    const int d = maps[1].d;
    if (m == 0) return apply_sparse(maps[1], {sparse_mul(left, right, d)});
    std::vector<SparseElem> slots;
    slots.reserve(m + 1);
    slots.push_back(left);
    for (const auto& s : interior) slots.push_back(s);
    slots.push_back(right);
    return apply_sparse(maps[m + 1], slots);
  };
}

Sigma0Report certify_sigma0(const Distribution& mu, int D, double tol) {
  if (2 * D > mu.L)
    throw InsufficientOrder("Gram degree needs moments to twice the degree");
  Sigma0Report rep;
  const PatternValue value = pattern_from_distribution(mu);
  const SparseElem one = sparse_identity(mu.d);
  rep.identity_residual = op_norm(value(0, one, {}, one) - Matrix::Identity(mu.d, mu.d));
  rep.bound_M = empirical_bound(mu.moments);
  Matrix G = assemble_gram(mu.d, monomial_basis(mu.d, D, true), value);
  G = (G + Matrix(G.adjoint())) / 2.0;
  rep.gram_min_eig = min_eig_hermitian(G);
  rep.pass = rep.identity_residual <= tol && rep.gram_min_eig >= -tol &&
             rep.bound_M <= mu.M * (1.0 + 1e-9) + tol;
  return rep;
}

namespace {

// Fixed point W = (b - var W)^{-1}, the resolvent equation of a semicircular
// element with covariance var * id. Plain iteration contracts on the lower
// half-plane image; near-axis arguments converge slowly but surely.
LevelMatrix dyson_resolvent(double var, const LevelMatrix& b) {
  if (half_plane_margin(b) <= 0.0) throw OutsideConvergence("resolvent argument not in upper half-plane");
  Matrix W = inverse(b.mat);
  const int max_iter = 500000;
  for (int it = 0; it < max_iter; ++it) {
    Matrix next = inverse(Matrix(b.mat - var * W));
    const double step = (next - W).norm();
    W = std::move(next);
    if (step <= 1e-14 * (1.0 + W.norm())) return {b.d, b.n, std::move(W)};
  }
  throw MaxIterations("semicircular resolvent iteration stalled");
}

}  // namespace

// Mixed moments factor into a product of Catalan numbers, one per diagonal
// colour, and each index path pins down a single unit tuple.
std::vector<MultilinearMap> independent_diagonal_moments(int L) {
  const int d = 2;
  std::vector<MultilinearMap> out;
  out.reserve(L);
  for (int k = 0; k < L; ++k) {
    MultilinearMap T(d, k);
    const int positions = k + 1;
    for (int mask = 0; mask < (1 << positions); ++mask) {
      int c1 = 0;
      for (int t = 0; t < positions; ++t) c1 += (mask >> t) & 1;
      const int c0 = positions - c1;
      if (c0 % 2 != 0 || c1 % 2 != 0) continue;
      const double w = double(catalan(c0 / 2)) * double(catalan(c1 / 2));
      std::vector<int> tuple(k);
      for (int t = 1; t <= k; ++t) {
        const int prev = (mask >> (t - 1)) & 1, cur = (mask >> t) & 1;
        tuple[t - 1] = cur * d + prev;
      }
      const int i0 = mask & 1, ik = (mask >> k) & 1;
      T.op(ik * d + i0, tuple_index(tuple, d)) += w;
    }
    out.push_back(std::move(T));
  }
  return out;
}

namespace {

LevelMatrix independent_diagonal_resolvent(const LevelMatrix& b, int nodes) {
  if (b.d != 2) throw DimensionMismatch("independent_diagonal resolvent");
  if (half_plane_margin(b) <= 0.0) throw OutsideConvergence("resolvent argument not in upper half-plane");
  const int N = nodes, n = b.n;
  std::vector<double> t(N), w(N);
  for (int i = 1; i <= N; ++i) {
    const double th = M_PI * i / (N + 1);
    t[i - 1] = 2.0 * std::cos(th);
    w[i - 1] = 2.0 / (N + 1) * std::sin(th) * std::sin(th);
  }
  Matrix acc = Matrix::Zero(b.mat.rows(), b.mat.cols());
  Matrix shifted = b.mat;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      shifted = b.mat;
      for (int blk = 0; blk < n; ++blk) {
        shifted(blk * 2, blk * 2) -= t[i];
        shifted(blk * 2 + 1, blk * 2 + 1) -= t[j];
      }
      acc += (w[i] * w[j]) * inverse(shifted);
    }
  return {b.d, b.n, std::move(acc)};
}

Distribution semicircular_fixture(const FixtureParams& p) {
  const int d = p.d, L = p.L;
  std::vector<MultilinearMap> cums;
  cums.reserve(L);
  for (int k = 0; k < L; ++k) {
    MultilinearMap c(d, k);
    if (k == 1) c.op = p.var * Matrix::Identity(d * d, d * d);
    cums.push_back(std::move(c));
  }
  Distribution mu = distribution_from_cumulants(d, L, std::move(cums));
  mu.M = 2.0 * std::sqrt(p.var);
  const double var = p.var;
  mu.exact_resolvent = [var](const LevelMatrix& b) { return dyson_resolvent(var, b); };
  return mu;
}

}  // namespace

Distribution distribution_from_moments(int d, int L, std::vector<MultilinearMap> moments) {
  Distribution mu;
  mu.d = d;
  mu.L = L;
  mu.cumulants = cumulants_from_moments(moments, L);
  mu.moments = std::move(moments);
  mu.M = empirical_bound(mu.moments);
  return mu;
}

Distribution distribution_from_cumulants(int d, int L, std::vector<MultilinearMap> cumulants) {
  Distribution mu;
  mu.d = d;
  mu.L = L;
  mu.moments = moments_from_cumulants(cumulants, L);
  mu.cumulants = std::move(cumulants);
  mu.M = empirical_bound(mu.moments);
  return mu;
}

Distribution distribution_from_realization(Realization r, int L) {
  Distribution mu;
  mu.d = r.d;
  mu.L = L;
  mu.moments = moments_from_realization(r, L);
  mu.cumulants = cumulants_from_moments(mu.moments, L);
  mu.M = op_norm(r.a);
  mu.realization = r;
  const Realization rc = r;
  mu.exact_resolvent = [rc](const LevelMatrix& b) {
    if (half_plane_margin(b) <= 0.0)
      throw OutsideConvergence("resolvent argument not in upper half-plane");
    return realization_resolvent(rc, b);
  };
  return mu;
}

Distribution fixture(const std::string& name, const FixtureParams& params) {
  FixtureParams p = params;
  if (name == "semicircular") return semicircular_fixture(p);
  if (name == "point_mass") {
    Matrix b0 = p.b0;
    if (b0.size() == 0) {
      b0 = Matrix::Zero(p.d, p.d);
      for (int i = 0; i < p.d; ++i) b0(i, i) = double(i + 1);
    }
    if (!is_self_adjoint(b0)) throw SelfAdjointnessViolated("point mass needs a self-adjoint atom");
    return distribution_from_realization({int(b0.rows()), 1, b0}, p.L);
  }
  if (name == "bernoulli_scalar") {
    Matrix a(2, 2);
    a << 1.0, 0.0, 0.0, -1.0;
    return distribution_from_realization({1, 2, a}, p.L);
  }
  if (name == "independent_diagonal") {
    Distribution mu;
    mu.d = 2;
    mu.L = p.L;
    mu.moments = independent_diagonal_moments(p.L);
    mu.cumulants = cumulants_from_moments(mu.moments, p.L);
    mu.M = 2.0;
    mu.exact_resolvent = [](const LevelMatrix& b) {
      return independent_diagonal_resolvent(b, 48);
    };
    return mu;
  }
  if (name == "realization_random") {
    const int dm = p.d * p.m;
    std::mt19937_64 rng(p.seed ^ 0x2545f4914f6cdd1dULL);
    std::normal_distribution<double> g;
    Matrix Z(dm, dm);
    for (int i = 0; i < dm; ++i)
      for (int j = 0; j < dm; ++j) Z(i, j) = Complex(g(rng), g(rng));
    Matrix a = (Z + Matrix(Z.adjoint())) / (2.0 * std::sqrt(double(dm)));
    return distribution_from_realization({p.d, p.m, std::move(a)}, p.L);
  }
  throw UnknownFixture("no fixture named '" + name + "'");
}

}  // namespace freeprob
