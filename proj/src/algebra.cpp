#include "freeprob/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

namespace freeprob {

LevelMatrix adjoint(const LevelMatrix& b) { return {b.d, b.n, b.mat.adjoint()}; }

LevelMatrix imag_part(const LevelMatrix& b) {
  return {b.d, b.n, (b.mat - b.mat.adjoint()) / Complex(0.0, 2.0)};
}

LevelMatrix real_part(const LevelMatrix& b) {
  return {b.d, b.n, (b.mat + b.mat.adjoint()) / 2.0};
}

double half_plane_margin(const LevelMatrix& b) {
  return min_eig_hermitian(imag_part(b).mat);
}

double spectrum_floor(const LevelMatrix& b) {
  Eigen::ComplexEigenSolver<Matrix> es(b.mat, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw SingularValue("eigenvalue solve failed");
  return es.eigenvalues().cwiseAbs().minCoeff();
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix inverse(const Matrix& m) {
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) throw SingularValue("matrix not invertible");
  return lu.inverse();
}

LevelMatrix inverse(const LevelMatrix& b) {
  return {b.d, b.n, inverse(b.mat)};
}

LevelMatrix amplify(const Matrix& b0, int n) {
  const int d = static_cast<int>(b0.rows());
  if (b0.cols() != d) throw DimensionMismatch("amplify expects square b0");
  LevelMatrix out(d, n);
  for (int i = 0; i < n; ++i) out.block(i, i) = b0;
  return out;
}

bool is_self_adjoint(const Matrix& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eig_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) throw SingularValue("hermitian eigensolve failed");
  return es.eigenvalues().minCoeff();
}

bool is_psd(const Matrix& m, double tol, double* min_eig) {
  const double lo = min_eig_hermitian(m);
  if (min_eig) *min_eig = lo;
  return lo >= -tol;
}

Matrix matrix_unit(int alpha, int d) {
  Matrix e = Matrix::Zero(d, d);
  e(alpha % d, alpha / d) = 1.0;
  return e;
}

Matrix lmult_op(const Matrix& b) {
  const int d = static_cast<int>(b.rows());
  return Eigen::kroneckerProduct(Matrix::Identity(d, d), b);
}

Matrix rmult_op(const Matrix& b) {
  const int d = static_cast<int>(b.rows());
  return Eigen::kroneckerProduct(b.transpose(), Matrix::Identity(d, d));
}

}  // namespace freeprob
