#include "doctest.h"
#include "freeprob/algebra.hpp"

using namespace freeprob;

namespace {

Matrix random_matrix(int d, unsigned seed) {
  std::srand(seed);
  return Matrix::Random(d, d);
}

}  // namespace

TEST_CASE("vec and unvec invert each other") {
  const Matrix m = random_matrix(3, 11);
  CHECK((unvec(vec(m), 3) - m).norm() == doctest::Approx(0.0));
}

TEST_CASE("matrix units follow the column-major index") {
  const int d = 3;
  for (int a = 0; a < d * d; ++a) {
    const Matrix e = matrix_unit(a, d);
    CHECK(e(a % d, a / d) == Complex(1.0, 0.0));
    CHECK(e.norm() == doctest::Approx(1.0));
    CHECK(vec(e)(a) == Complex(1.0, 0.0));
  }
}

TEST_CASE("multiplication operators act on vectorized elements") {
  const Matrix b = random_matrix(3, 5), x = random_matrix(3, 7);
  CHECK((lmult_op(b) * vec(x) - vec(Matrix(b * x))).norm() < 1e-13);
  CHECK((rmult_op(b) * vec(x) - vec(Matrix(x * b))).norm() < 1e-13);
}

TEST_CASE("half-plane margin is the smallest eigenvalue of the imaginary part") {
  Matrix b(2, 2);
  b << Complex(1.0, 2.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(-3.0, 0.5);
  CHECK(half_plane_margin(LevelMatrix(2, 1, b)) == doctest::Approx(0.5));
  b(1, 1) = Complex(-3.0, -0.5);
  CHECK(half_plane_margin(LevelMatrix(2, 1, b)) == doctest::Approx(-0.5));
}

TEST_CASE("operator norm and spectrum floor on a diagonal") {
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = Complex(3.0, 0.0);
  b(1, 1) = Complex(0.0, -0.25);
  CHECK(op_norm(b) == doctest::Approx(3.0));
  CHECK(spectrum_floor(LevelMatrix(2, 1, b)) == doctest::Approx(0.25));
}

TEST_CASE("inverse rejects singular input") {
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = 1.0;
  CHECK_THROWS_AS((void)inverse(b), SingularValue);
  const Matrix g = random_matrix(3, 9) + 5.0 * Matrix::Identity(3, 3);
  CHECK((inverse(g) * g - Matrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("amplify embeds a block diagonally") {
  const Matrix b = random_matrix(2, 3);
  const LevelMatrix a = amplify(b, 3);
  CHECK(a.n == 3);
  CHECK((a.block(1, 1) - b).norm() == doctest::Approx(0.0));
  CHECK(a.block(0, 1).norm() == doctest::Approx(0.0));
}

TEST_CASE("self-adjointness and psd checks") {
  Matrix h(2, 2);
  h << 2.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0;
  CHECK(is_self_adjoint(h));
  CHECK(is_psd(h, 1e-12));
  CHECK(min_eig_hermitian(h) == doctest::Approx(1.0));
  h(0, 0) = Complex(2.0, 0.1);
  CHECK_FALSE(is_self_adjoint(h));
}
