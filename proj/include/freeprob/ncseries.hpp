#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "freeprob/multilinear.hpp"

namespace freeprob {

// Truncated noncommutative power series around 0: coeffs[ell] is the
// multilinear coefficient of the homogeneous degree-ell term, ell = 0..L.
// Evaluation at a level-n argument uses the amplified index-sum formula, so
// a series is a graded function on all matrix levels at once.
struct NCSeries {
  int d = 1;
  int L = 0;
  std::vector<MultilinearMap> coeffs;
  // When built from a distribution with exponential bound M, coefficient
  // norms on elementary tensors are bounded by M^(ell-1); stored here so
  // consumers can report geometric tail estimates.
  std::optional<double> tail_bound;

  NCSeries() = default;
  NCSeries(int d_, int L_) : d(d_), L(L_) {
    coeffs.reserve(L + 1);
    for (int ell = 0; ell <= L; ++ell) coeffs.emplace_back(d_, ell);
  }
};

enum class OracleKind {
  TruncatedSeries,     // entire or truncated: exact on nilpotent arguments
  AnalyticAtZero,      // analytic near 0, evaluable on nilpotent arguments
  RequiresInvertible,  // needs invertible input, extraction regularizes
};

struct NCOracle {
  std::function<LevelMatrix(const LevelMatrix&)> eval;
  OracleKind kind = OracleKind::AnalyticAtZero;
};

NCOracle series_oracle(NCSeries s);

LevelMatrix eval(const NCSeries& s, const LevelMatrix& b);

NCSeries add(const NCSeries& a, const NCSeries& b);
NCSeries scale(Complex z, const NCSeries& s);
NCSeries truncate(const NCSeries& s, int L);

// Coefficient of the product: tensor-slot concatenation summed over splits.
NCSeries multiply(const NCSeries& a, const NCSeries& b);

// Multiplicative inverse. Two shapes are accepted:
//  - invertible constant term: ordinary Neumann inversion, order preserved;
//  - Cauchy shape s(w) = w + higher with left-factored coefficients: returns
//    the regular part r of s(w)^{-1} = w^{-1} + r(w), of order L-2.
// Anything else raises SingularLeadingTerm.
NCSeries mult_inverse(const NCSeries& s);

// s(t(w)) for t with zero constant term.
NCSeries compose(const NCSeries& s, const NCSeries& t);

// Compositional inverse of s = w + higher; degree-by-degree triangular solve.
NCSeries comp_inverse(const NCSeries& s);

// Taylor coefficients of an oracle via evaluation on block bidiagonal
// arguments: the top-right corner of f on the (ell+1) x (ell+1) bidiagonal
// with superdiagonal (B_1, ..., B_ell) is the ell-th coefficient applied to
// that tuple. Nilpotent arguments are used when the oracle admits them;
// otherwise the diagonal is shifted by delta and first-order Richardson
// extrapolation (delta, delta/2) removes the leading error term.
NCSeries extract_coefficients(const NCOracle& f, int d, int L, double delta = 1e-3);

// f applied to [[X, Z], [0, Y]]; returns the top-right block, the value of
// the difference-differential operator of f at (X, Y) in direction Z.
Matrix delta_R_eval(const std::function<LevelMatrix(const LevelMatrix&)>& f,
                    const LevelMatrix& X, const LevelMatrix& Y, const Matrix& Z);

}  // namespace freeprob
