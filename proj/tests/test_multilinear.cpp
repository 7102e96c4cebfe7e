#include <random>

#include "doctest.h"
#include "freeprob/multilinear.hpp"

using namespace freeprob;

namespace {

std::mt19937_64 rng(424242);

Matrix rand_mat(int d) {
  std::normal_distribution<double> g;
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

MultilinearMap rand_map(int d, int ell) {
  MultilinearMap T(d, ell);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < T.op.rows(); ++i)
    for (Eigen::Index j = 0; j < T.op.cols(); ++j) T.op(i, j) = Complex(g(rng), g(rng));
  return T;
}

std::vector<Matrix> rand_args(int d, int ell) {
  std::vector<Matrix> a;
  for (int i = 0; i < ell; ++i) a.push_back(rand_mat(d));
  return a;
}

}  // namespace

TEST_CASE("identity and constant maps") {
  const Matrix x = rand_mat(2);
  CHECK((MultilinearMap::identity(2).apply({x}) - x).norm() < 1e-14);
  CHECK((MultilinearMap::constant(x).apply({}) - x).norm() < 1e-14);
}

TEST_CASE("apply respects multilinearity") {
  const auto T = rand_map(2, 3);
  auto args = rand_args(2, 3);
  const Matrix base = T.apply(args);
  auto scaled = args;
  scaled[1] *= Complex(2.0, -1.0);
  CHECK((T.apply(scaled) - Complex(2.0, -1.0) * base).norm() < 1e-10);
  auto shifted = args;
  const Matrix y = rand_mat(2);
  shifted[2] += y;
  auto other = args;
  other[2] = y;
  CHECK((T.apply(shifted) - base - T.apply(other)).norm() < 1e-10);
}

TEST_CASE("level evaluation matches the block index sum") {
  const int d = 2, n = 3;
  const auto T = rand_map(d, 2);
  LevelMatrix b(d, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b.block(i, j) = rand_mat(d);
  const LevelMatrix R = apply_level(T, b);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Matrix want = Matrix::Zero(d, d);
      for (int k = 0; k < n; ++k) want += T.apply({b.block(i, k), b.block(k, j)});
      CHECK((Matrix(R.block(i, j)) - want).norm() < 1e-10);
    }
}

TEST_CASE("sparse application agrees with dense") {
  const int d = 2;
  const auto T = rand_map(d, 2);
  std::vector<std::vector<std::pair<int, Complex>>> slots = {
      {{0, Complex(1.0, 0.0)}, {3, Complex(0.0, 2.0)}},
      {{2, Complex(-1.0, 0.5)}}};
  Matrix x0 = matrix_unit(0, d) + Complex(0.0, 2.0) * matrix_unit(3, d);
  Matrix x1 = Complex(-1.0, 0.5) * matrix_unit(2, d);
  CHECK((apply_sparse(T, slots) - T.apply({x0, x1})).norm() < 1e-12);
  CHECK(apply_sparse(T, {{}, {{0, 1.0}}}).norm() == doctest::Approx(0.0));
}

TEST_CASE("concat product splits its slots") {
  const auto T = rand_map(2, 1), U = rand_map(2, 2);
  const auto P = concat_product(T, U);
  const auto a = rand_args(2, 3);
  CHECK((P.apply(a) - T.apply({a[0]}) * U.apply({a[1], a[2]})).norm() < 1e-10);
}

TEST_CASE("sandwich adds outer slots") {
  const auto m = rand_map(2, 1);
  const auto S = sandwich(m);
  const auto SL = sandwich_left(m);
  const auto a = rand_args(2, 3);
  CHECK((S.apply(a) - a[0] * m.apply({a[1]}) * a[2]).norm() < 1e-10);
  CHECK((SL.apply({a[0], a[1]}) - a[0] * m.apply({a[1]})).norm() < 1e-10);
}

TEST_CASE("strip recovers a factored slot") {
  const auto S = rand_map(2, 2);
  double res = -1.0;
  const auto left = strip_left(sandwich_left(S), &res);
  CHECK(res < 1e-10);
  CHECK((left.op - S.op).norm() < 1e-12);
  // right factor: T(x_1, x_2, x_3) = S(x_1, x_2) * x_3
  const auto T = concat_product(S, MultilinearMap::identity(2));
  const auto right = strip_right(T, &res);
  CHECK(res < 1e-10);
  CHECK((right.op - S.op).norm() < 1e-12);
  // a generic map does not factor
  strip_left(rand_map(2, 2), &res);
  CHECK(res > 1e-3);
}

TEST_CASE("compose_slots plugs parts into consecutive slots") {
  const auto S = rand_map(2, 2);
  const auto P1 = rand_map(2, 2), P2 = rand_map(2, 1);
  const auto C = compose_slots(S, {&P1, &P2});
  CHECK(C.ell == 3);
  const auto a = rand_args(2, 3);
  const Matrix want = S.apply({P1.apply({a[0], a[1]}), P2.apply({a[2]})});
  CHECK((C.apply(a) - want).norm() < 1e-10);
  const auto C0 = compose_slots(MultilinearMap::constant(rand_mat(2)), {});
  CHECK(C0.ell == 0);
}

TEST_CASE("output transform acts after evaluation") {
  const auto T = rand_map(2, 1);
  const Matrix b = rand_mat(2);
  const auto U = out_transform(lmult_op(b), T);
  const Matrix x = rand_mat(2);
  CHECK((U.apply({x}) - b * T.apply({x})).norm() < 1e-10);
}

TEST_CASE("reversed adjoint is an involution and fixes symmetric maps") {
  const auto T = rand_map(2, 2);
  const auto TT = rev_adjoint(rev_adjoint(T));
  CHECK((TT.op - T.op).norm() < 1e-12);
  const auto a = rand_args(2, 2);
  const Matrix lhs = rev_adjoint(T).apply({a[0], a[1]});
  const Matrix rhs = T.apply({Matrix(a[1].adjoint()), Matrix(a[0].adjoint())}).adjoint();
  CHECK((lhs - rhs).norm() < 1e-10);
}

TEST_CASE("tuple index is lexicographic with the first slot most significant") {
  CHECK(tuple_index({0, 0}, 2) == 0);
  CHECK(tuple_index({0, 1}, 2) == 1);
  CHECK(tuple_index({1, 0}, 2) == 4);
  CHECK(tuple_index({2, 3, 1}, 2) == 2 * 16 + 3 * 4 + 1);
}
