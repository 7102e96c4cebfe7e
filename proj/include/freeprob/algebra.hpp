#pragma once

#include <Eigen/Dense>
#include <complex>

#include "freeprob/errors.hpp"

namespace freeprob {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Element of M_n(B) for B = M_d(C), stored as one nd x nd matrix whose
// (i,j) block of size d x d is the B-entry at position (i,j).
struct LevelMatrix {
  int d = 1;
  int n = 1;
  Matrix mat;

  LevelMatrix() : mat(Matrix::Zero(1, 1)) {}
  LevelMatrix(int d_, int n_) : d(d_), n(n_), mat(Matrix::Zero(d_ * n_, d_ * n_)) {}
  LevelMatrix(int d_, int n_, Matrix m) : d(d_), n(n_), mat(std::move(m)) {
    if (mat.rows() != d * n || mat.cols() != d * n)
      throw DimensionMismatch("LevelMatrix payload must be nd x nd");
  }

  int dim() const { return d * n; }

  Eigen::Block<Matrix> block(int i, int j) { return mat.block(i * d, j * d, d, d); }
  Eigen::Block<const Matrix> block(int i, int j) const { return mat.block(i * d, j * d, d, d); }

  static LevelMatrix identity(int d, int n) {
    return {d, n, Matrix::Identity(d * n, d * n)};
  }
  static LevelMatrix scalar(Complex z, int d, int n = 1) {
    return {d, n, z * Matrix::Identity(d * n, d * n)};
  }
};

inline LevelMatrix operator+(const LevelMatrix& a, const LevelMatrix& b) {
  if (a.d != b.d || a.n != b.n) throw DimensionMismatch("LevelMatrix add");
  return {a.d, a.n, a.mat + b.mat};
}
inline LevelMatrix operator-(const LevelMatrix& a, const LevelMatrix& b) {
  if (a.d != b.d || a.n != b.n) throw DimensionMismatch("LevelMatrix sub");
  return {a.d, a.n, a.mat - b.mat};
}
inline LevelMatrix operator*(const LevelMatrix& a, const LevelMatrix& b) {
  if (a.d != b.d || a.n != b.n) throw DimensionMismatch("LevelMatrix mul");
  return {a.d, a.n, a.mat * b.mat};
}
inline LevelMatrix operator*(Complex z, const LevelMatrix& a) { return {a.d, a.n, z * a.mat}; }

LevelMatrix adjoint(const LevelMatrix& b);

// (b - b*) / 2i, the self-adjoint imaginary part.
LevelMatrix imag_part(const LevelMatrix& b);
LevelMatrix real_part(const LevelMatrix& b);

// Smallest eigenvalue of imag_part(b); positive iff b lies in the open
// matrix upper half-plane at this level.
double half_plane_margin(const LevelMatrix& b);

// min |lambda| over the spectrum of the full nd x nd matrix.
double spectrum_floor(const LevelMatrix& b);

// Operator 2-norm (largest singular value).
double op_norm(const Matrix& m);
inline double op_norm(const LevelMatrix& b) { return op_norm(b.mat); }

// Throws SingularValue when the argument is not invertible.
Matrix inverse(const Matrix& m);
LevelMatrix inverse(const LevelMatrix& b);

// Diagonal embedding of b0 into M_n(B): block-diagonal with n copies of b0.
LevelMatrix amplify(const Matrix& b0, int n);

bool is_self_adjoint(const Matrix& m, double tol = 1e-12);

// Eigenvalue-threshold positivity test for self-adjoint m; also reports the
// smallest eigenvalue so callers can quote the margin.
bool is_psd(const Matrix& m, double tol, double* min_eig = nullptr);

double min_eig_hermitian(const Matrix& m);

// Column-major vectorization fixed once for the whole library. Basis index
// alpha in [0, d^2) means the matrix unit with 1 at (row, col) where
// alpha = col * d + row.
inline Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}
inline Matrix unvec(const Vector& v, int d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}
Matrix matrix_unit(int alpha, int d);

// vec(b x) = lmult_op(b) vec(x), vec(x b) = rmult_op(b) vec(x).
Matrix lmult_op(const Matrix& b);
Matrix rmult_op(const Matrix& b);

}  // namespace freeprob
