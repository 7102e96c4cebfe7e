#pragma once

#include <functional>
#include <optional>
#include <string>

#include "freeprob/multilinear.hpp"
#include "freeprob/ncseries.hpp"

namespace freeprob {

// Finite-dimensional model (A, E, a): A = M_{d m}(C) with B = M_d(C)
// embedded as b (x) 1_m, E the block-trace conditional expectation onto B,
// and a self-adjoint element a of A.
struct Realization {
  int d = 1;
  int m = 1;
  Matrix a;
};

Matrix realization_embed(const Realization& r, const Matrix& b);
Matrix realization_expect(const Realization& r, const Matrix& A);

// E_n[(b (x) 1_m - 1_n (x) a)^{-1}] wherever the resolvent exists; throws
// SingularResolvent on the exceptional set. Invertibility is guaranteed on
// the matrix upper half-plane.
LevelMatrix realization_resolvent(const Realization& r, const LevelMatrix& b);

// B-valued distribution truncated at moment order L. moments[k] is the
// interior moment map of arity k, m_{k+1}(b_1..b_k) = mu(X b_1 X ... b_k X);
// cumulants[k] is the free cumulant c^(k+1) of the same arity. M is an
// exponential bound witness for the moment growth.
struct Distribution {
  int d = 1;
  int L = 0;
  double M = 1.0;
  std::vector<MultilinearMap> moments;
  std::vector<MultilinearMap> cumulants;
  std::optional<Realization> realization;
  // Exact Cauchy-transform backend valid on the whole matrix upper
  // half-plane, present for fixtures that have one (resolvent of a
  // realization, quadrature, or an entire R-transform fixed point).
  std::function<LevelMatrix(const LevelMatrix&)> exact_resolvent;

  const MultilinearMap& moment(int ell) const { return moments.at(ell - 1); }
  const MultilinearMap& cumulant(int ell) const { return cumulants.at(ell - 1); }
};

std::vector<MultilinearMap> moments_from_realization(const Realization& r, int L);

// Moment-cumulant conversion by summation over non-crossing partitions with
// nested evaluation: inner blocks evaluate first and their values are
// inserted as B-arguments of the enclosing block.
std::vector<MultilinearMap> moments_from_cumulants(const std::vector<MultilinearMap>& cums,
                                                   int L);
std::vector<MultilinearMap> cumulants_from_moments(const std::vector<MultilinearMap>& moms,
                                                   int L);

// Value of mu on the word b_1 X b_2 X ... X b_{ell+1} given interior moment
// maps and bimodularity.
Matrix moment_word(const Distribution& mu, const std::vector<Matrix>& outer_word);

// Smallest M visible on sampled unit-norm tuples: max of
// ||m_ell(b_1..b_{ell-1})||^(1/ell).
double empirical_bound(const std::vector<MultilinearMap>& moments, std::uint64_t seed = 0,
                       int trials = 50);

// Monomial e_{u_0} X e_{u_1} ... e_{u_{k-1}} X with k = units.size() >= 1,
// or the constant monomial 1 for empty units. Right B-factors are absorbed
// by the M_N(B)-valued Gram, so no trailing unit is carried.
struct Monomial {
  std::vector<int> units;
};

std::vector<Monomial> monomial_basis(int d, int D, bool include_constant);

using SparseElem = std::vector<std::pair<int, Complex>>;

// Value of a linear functional on the pattern
//   left * (X a_1 X a_2 ... a_{m-1} X) * right
// with m >= 1 copies of X, or left * right for m = 0. Slots arrive as sparse
// vectorized elements.
using PatternValue = std::function<Matrix(int m, const SparseElem& left,
                                          const std::vector<SparseElem>& interior,
                                          const SparseElem& right)>;

// Gram matrix [value(P_i^* P_j)] over the basis, as one (N d) x (N d) matrix.
Matrix assemble_gram(int d, const std::vector<Monomial>& basis, const PatternValue& value);

// Pattern backend reading a bimodular map family through its interior slots,
// value = left * maps[m-1](a_1, ..., a_{m-1}) * right. maps[k] must have
// arity k, so maps[0] is the constant map for the single-X pattern.
PatternValue pattern_from_interior_maps(std::vector<MultilinearMap> maps, int d);

// Pattern backend reading mu through bimodularity and interior moments.
PatternValue pattern_from_distribution(const Distribution& mu);

// Pattern backend for coefficient maps T_{m+1} carrying explicit outer slots,
// value = T_{m+1}(left, a_1, ..., a_{m-1}, right). No bimodularity assumed.
PatternValue pattern_from_outer_maps(const std::vector<MultilinearMap>& maps_by_arity);

struct Sigma0Report {
  double identity_residual = 0.0;
  double bound_M = 0.0;
  double gram_min_eig = 0.0;
  bool pass = false;
};

// Checks the state conditions up to Gram degree D: identity on B,
// exponential bound (reported empirically), complete positivity of
// [mu(P_i^* P_j)] over the monomial basis.
Sigma0Report certify_sigma0(const Distribution& mu, int D, double tol = 1e-10);

struct FixtureParams {
  int d = 1;
  int L = 6;
  double var = 1.0;
  Matrix b0;          // point_mass
  int m = 2;          // realization size factor
  std::uint64_t seed = 0;
};

// Named example distributions: "semicircular", "point_mass",
// "bernoulli_scalar", "independent_diagonal", "realization_random".
Distribution fixture(const std::string& name, const FixtureParams& params = {});

// Moment family of a pair of classically independent standard semicircular
// variables placed on the diagonal of M_2, under the entrywise expectation.
// Kept separate from fixture() so callers needing only moments skip the
// cumulant solve.
std::vector<MultilinearMap> independent_diagonal_moments(int L);

Distribution distribution_from_moments(int d, int L, std::vector<MultilinearMap> moments);
Distribution distribution_from_cumulants(int d, int L, std::vector<MultilinearMap> cumulants);
Distribution distribution_from_realization(Realization r, int L);

}  // namespace freeprob
