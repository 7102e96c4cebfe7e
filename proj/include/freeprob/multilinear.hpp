#pragma once

#include <utility>
#include <vector>

#include "freeprob/algebra.hpp"

namespace freeprob {

// Multilinear map B^ell -> B for B = M_d(C), stored as a d^2 x d^(2 ell)
// matrix acting on vectorized elementary tensors:
//   T(x_1, ..., x_ell) = unvec(op * (vec(x_1) (x) ... (x) vec(x_ell))).
// The column index runs over tuples (s_1, ..., s_ell) of basis indices with
// s_1 most significant. Arity 0 is a constant, op is d^2 x 1.
struct MultilinearMap {
  int d = 1;
  int ell = 0;
  Matrix op;

  MultilinearMap() : op(Matrix::Zero(1, 1)) {}
  MultilinearMap(int d_, int ell_) : d(d_), ell(ell_), op(Matrix::Zero(d_ * d_, cols(d_, ell_))) {}
  MultilinearMap(int d_, int ell_, Matrix m) : d(d_), ell(ell_), op(std::move(m)) {
    if (op.rows() != d * d || op.cols() != cols(d, ell))
      throw DimensionMismatch("MultilinearMap payload shape");
  }

  static Eigen::Index cols(int d, int ell) {
    Eigen::Index c = 1;
    for (int i = 0; i < ell; ++i) c *= Eigen::Index(d) * d;
    return c;
  }

  static MultilinearMap identity(int d) {
    return {d, 1, Matrix::Identity(d * d, d * d)};
  }
  static MultilinearMap constant(const Matrix& b) {
    const int d = static_cast<int>(b.rows());
    return {d, 0, vec(b)};
  }

  Matrix constant_value() const { return unvec(op.col(0), d); }

  Matrix apply(const std::vector<Matrix>& args) const;

  // Frobenius-compatible 2-norm of the representing matrix.
  double norm() const { return op_norm(op); }
};

// Contract the first slot with a fixed vectorized element: the returned
// matrix represents (x_2, ..., x_ell) -> T(x, x_2, ..., x_ell).
Matrix contract_first(const Matrix& A, const Vector& v, int d2);

// Level-n evaluation at a single argument b in M_n(B), all slots equal:
// block (i,j) of the result is the index sum over T(b_{i,k_1}, ..., b_{k,j}).
// Zero blocks of b are skipped, so nilpotent band matrices evaluate fast.
LevelMatrix apply_level(const MultilinearMap& T, const LevelMatrix& b);

// Directional derivative of the level-n evaluation: sum over slot positions
// of T(b, ..., E at one slot, ..., b). Zero for arity 0.
LevelMatrix apply_level_deriv(const MultilinearMap& T, const LevelMatrix& b,
                              const LevelMatrix& E);

// Apply with each slot given as a sparse vectorized element (pairs of basis
// index and coefficient). Used by Gram assembly where slots are matrix units.
Matrix apply_sparse(const MultilinearMap& T,
                    const std::vector<std::vector<std::pair<int, Complex>>>& slots);

// (x_1,...,x_{j+k}) -> T(x_1..x_j) * U(x_{j+1}..x_{j+k}).
MultilinearMap concat_product(const MultilinearMap& T, const MultilinearMap& U);

// (x_0, x_1, ..., x_ell, x_{ell+1}) -> x_0 * m(x_1..x_ell) * x_{ell+1}.
MultilinearMap sandwich(const MultilinearMap& m);

// (x_0, x_1, ..., x_ell) -> x_0 * m(x_1..x_ell).
MultilinearMap sandwich_left(const MultilinearMap& m);

// S(x_2,...,x_ell) := T(1, x_2, ..., x_ell). residual (if requested) reports
// how far T is from the factored form x_1 * S(...), sampled on random tuples.
MultilinearMap strip_left(const MultilinearMap& T, double* residual = nullptr);
// S(x_1,...,x_{ell-1}) := T(x_1, ..., x_{ell-1}, 1), factored form ... * x_ell.
MultilinearMap strip_right(const MultilinearMap& T, double* residual = nullptr);

// Composition step: plug parts into consecutive slots of S,
// result arity = sum of part arities.
MultilinearMap compose_slots(const MultilinearMap& S,
                             const std::vector<const MultilinearMap*>& parts);

// A acts on the output: x -> unvec(A vec(T(x))).
MultilinearMap out_transform(const Matrix& A, const MultilinearMap& T);

// T#(x_1,...,x_ell) := T(x_ell^*, ..., x_1^*)^*. A map is adjoint-symmetric
// (takes self-adjoint tuples to values with T(b,..,b)* = T(b*,..,b*)) iff
// T# == T.
MultilinearMap rev_adjoint(const MultilinearMap& T);

// Flat column index of a tuple of basis indices, first entry most significant.
Eigen::Index tuple_index(const std::vector<int>& tuple, int d);

}  // namespace freeprob
