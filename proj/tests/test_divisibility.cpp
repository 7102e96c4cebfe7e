#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "freeprob/divisibility.hpp"
#include "freeprob/errors.hpp"
#include "freeprob/inversion.hpp"

using namespace freeprob;

namespace {

LevelMatrix scalar_point(Complex z, int d) { return LevelMatrix::scalar(z, d); }

// x -> x^T on M_2, the standard witness of positivity without complete
// positivity.
CPMap transpose_map() {
  CPMap rho{2, Matrix::Zero(4, 4)};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) rho.op(i + 2 * j, j + 2 * i) = 1.0;
  return rho;
}

// x -> A x A^*.
CPMap conjugation_map(const Matrix& A) {
  const int d = int(A.rows());
  CPMap rho{d, Matrix(d * d, d * d)};
  for (int beta = 0; beta < d * d; ++beta)
    rho.op.col(beta) = vec(Matrix(A * matrix_unit(beta, d) * A.adjoint()));
  return rho;
}

Matrix random_matrix(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = Complex(g(rng), g(rng));
  return A;
}

double max_moment_gap(const Distribution& a, const Distribution& b) {
  double gap = 0.0;
  const std::size_t n = std::min(a.moments.size(), b.moments.size());
  for (std::size_t k = 0; k < n; ++k)
    gap = std::max(gap, op_norm(Matrix(a.moments[k].op - b.moments[k].op)));
  return gap;
}

}  // namespace

TEST_CASE("complete positivity through the block matrix") {
  const CPMap id = CPMap::identity(2);
  double me = -1.0;
  CHECK(is_completely_positive(id, 1e-10, &me));
  CHECK(std::abs(me) < 1e-12);
  // Frozen spectrum of the identity block matrix: {2, 0, 0, 0}.
  const Matrix C = choi_matrix(id);
  CHECK(op_norm(C) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_FALSE(is_completely_positive(transpose_map(), 1e-10, &me));
  CHECK(me == doctest::Approx(-1.0).epsilon(1e-12));

  CHECK(is_completely_positive(conjugation_map(random_matrix(2, 5)), 1e-10, &me));
  CHECK(me > -1e-12);
}

TEST_CASE("convolution adds semicircular variances") {
  const Distribution a = fixture("semicircular", {.d = 2, .L = 6, .var = 0.7});
  const Distribution b = fixture("semicircular", {.d = 2, .L = 6, .var = 1.3});
  const Distribution sum = convolve(a, b);
  const Distribution want = fixture("semicircular", {.d = 2, .L = 6, .var = 2.0});
  CHECK(max_moment_gap(sum, want) < 1e-12);
  CHECK(sum.M == doctest::Approx(a.M + b.M));
}

TEST_CASE("convolution square of the coin flip is the arcsine law") {
  const Distribution bern = fixture("bernoulli_scalar", {.L = 8});
  const Distribution arc = convolve(bern, bern);
  // Frozen even moments 2, 6, 20, 70; odd moments vanish.
  const double expect[8] = {0, 2, 0, 6, 0, 20, 0, 70};
  for (int k = 0; k < 8; ++k) {
    CHECK(std::abs(arc.moments[std::size_t(k)].op(0, 0) - expect[k]) < 1e-12);
  }
}

TEST_CASE("convolution with a point mass shifts only the mean term") {
  const Distribution pm = fixture("point_mass", {.d = 2, .L = 6});
  const Distribution sc = fixture("semicircular", {.d = 2, .L = 6});
  const Distribution sum = convolve(pm, sc);
  Matrix b0 = Matrix::Zero(2, 2);
  b0(0, 0) = 1.0;
  b0(1, 1) = 2.0;
  CHECK(op_norm(Matrix(sum.cumulants[0].constant_value() - b0)) < 1e-12);
  for (std::size_t k = 1; k < sum.cumulants.size(); ++k)
    CHECK(op_norm(Matrix(sum.cumulants[k].op - sc.cumulants[k].op)) < 1e-12);
}

TEST_CASE("convolution is associative and checks shapes") {
  const Distribution a = fixture("semicircular", {.d = 1, .L = 6});
  Matrix atom(1, 1);
  atom(0, 0) = 0.7;
  const Distribution b = fixture("point_mass", {.d = 1, .L = 6, .b0 = atom});
  const Distribution c = fixture("bernoulli_scalar", {.L = 8});
  CHECK(max_moment_gap(convolve(convolve(a, b), c), convolve(a, convolve(b, c))) < 1e-14);

  const Distribution wide = fixture("semicircular", {.d = 2, .L = 6});
  CHECK_THROWS_AS(convolve(a, wide), DimensionMismatch);
}

TEST_CASE("divisibility of the semicircular and point mass families") {
  const DivisibilityReport sc = is_infinitely_divisible(fixture("semicircular", {.d = 2, .L = 6}));
  CHECK(sc.pass);
  CHECK(std::abs(sc.gram_min_eig) <= 1e-12);

  const DivisibilityReport pm = is_infinitely_divisible(fixture("point_mass", {.d = 2, .L = 6}));
  CHECK(pm.pass);
  CHECK(std::abs(pm.gram_min_eig) <= 1e-12);
}

TEST_CASE("divisibility rejects the coin flip") {
  const Distribution bern = fixture("bernoulli_scalar", {.L = 8});
  const DivisibilityReport d3 = is_infinitely_divisible(bern, 3);
  CHECK_FALSE(d3.pass);
  CHECK(d3.gram_min_eig == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(d3.gram_min_eig <= -0.5);

  const DivisibilityReport d2 = is_infinitely_divisible(bern, 2);
  CHECK_FALSE(d2.pass);
  CHECK(d2.gram_min_eig == doctest::Approx(-1.0).epsilon(1e-10));

  CHECK_THROWS_AS(is_infinitely_divisible(fixture("semicircular", {.d = 1, .L = 4}), 3),
                  InsufficientOrder);
}

TEST_CASE("scalar divisibility matrix is the cumulant Hankel matrix") {
  // For d = 1 the monomial family reduces to powers, so the matrix must be
  // (kappa_{i+j})_{i,j=1..3} exactly.
  Matrix H(3, 3);
  H << 1.0, 0.0, -1.0, 0.0, -1.0, 0.0, -1.0, 0.0, 2.0;
  const Distribution bern = fixture("bernoulli_scalar", {.L = 8});
  const DivisibilityReport rep = is_infinitely_divisible(bern, 3);
  CHECK(rep.gram_min_eig == doctest::Approx(min_eig_hermitian(H)).epsilon(1e-10));
}

TEST_CASE("semigroup action: identity, halving, output transform") {
  const Distribution mu = fixture("semicircular", {.d = 2, .L = 6});
  const Distribution same = semigroup_apply(mu, CPMap::identity(2));
  CHECK(max_moment_gap(same, mu) < 1e-14);

  const Distribution half = semigroup_apply(mu, CPMap::scaled_identity(0.5, 2));
  CHECK(max_moment_gap(convolve(half, half), mu) < 1e-9);

  const CPMap rho = conjugation_map(random_matrix(2, 9));
  const Distribution pushed = semigroup_apply(mu, rho);
  const Matrix probe = random_matrix(2, 10);
  const Matrix lhs = pushed.cumulants[1].apply({probe});
  const Matrix rhs = rho.apply(mu.cumulants[1].apply({probe}));
  CHECK(op_norm(Matrix(lhs - rhs)) < 1e-12);
}

TEST_CASE("semigroup action rejects bad inputs") {
  const Distribution mu = fixture("semicircular", {.d = 2, .L = 6});
  CHECK_THROWS_AS(semigroup_apply(mu, transpose_map()), NotCP);
  CHECK_THROWS_AS(semigroup_apply(fixture("bernoulli_scalar", {.L = 8}), CPMap::identity(1)),
                  NotInfinitelyDivisible);
}

TEST_CASE("semigroup action composes") {
  const Distribution mu = fixture("semicircular", {.d = 2, .L = 6});
  const CPMap r1 = CPMap::scaled_identity(0.6, 2);
  const CPMap r2 = CPMap::scaled_identity(2.5, 2);
  const CPMap both{2, Matrix(r2.op * r1.op)};
  const Distribution two_step = semigroup_apply(semigroup_apply(mu, r1), r2);
  CHECK(max_moment_gap(two_step, semigroup_apply(mu, both)) < 1e-12);

  // Scaling by t and taking the t-th root are inverse operations.
  const Distribution tripled = semigroup_apply(mu, CPMap::scaled_identity(3.0, 2));
  CHECK(max_moment_gap(convolution_root(tripled, 3), mu) < 1e-12);
}

TEST_CASE("semigroup action transports the transform") {
  const Distribution mu = fixture("semicircular", {.d = 2, .L = 6});
  Matrix A = random_matrix(2, 21);
  A /= op_norm(A);
  const CPMap rho = conjugation_map(A);
  const Distribution nu = semigroup_apply(mu, rho);
  // High enough that the germ truncation sits below the tolerance.
  const LevelMatrix b = scalar_point(Complex(0.0, 100.0), 2);
  const Matrix lhs = voiculescu_eval(nu, b).mat;
  const Matrix rhs = rho.apply(voiculescu_eval(mu, b).mat);
  CHECK(op_norm(Matrix(lhs - rhs)) < 1e-8);
}

TEST_CASE("convolution roots") {
  const Distribution mu = fixture("semicircular", {.d = 2, .L = 6});
  CHECK(max_moment_gap(convolution_root(mu, 1), mu) < 1e-14);

  const Distribution root2 = convolution_root(mu, 2);
  CHECK(max_moment_gap(root2, fixture("semicircular", {.d = 2, .L = 6, .var = 0.5})) < 1e-12);
  CHECK(max_moment_gap(convolve(root2, root2), mu) < 1e-12);

  const Distribution mix = convolve(mu, fixture("point_mass", {.d = 2, .L = 6}));
  const Distribution root3 = convolution_root(mix, 3);
  CHECK(max_moment_gap(convolve(root3, convolve(root3, root3)), mix) < 1e-9);

  CHECK_THROWS_AS(convolution_root(mu, 0), DomainError);
  CHECK_THROWS_AS(convolution_root(mu, -2), DomainError);
}

TEST_CASE("transform extension certifies polynomial cumulant series everywhere") {
  const Distribution sc = fixture("semicircular", {.d = 1, .L = 8});
  const std::vector<LevelMatrix> pts{
      scalar_point(Complex(0.0, 0.5), 1), scalar_point(Complex(0.3, 0.5), 1),
      scalar_point(Complex(0.0, 2.0), 1), scalar_point(Complex(0.0, 10.0), 1)};
  const PhiExtensionReport rep = phi_extension_check(sc, pts);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].spectrum_floor == doctest::Approx(0.5).epsilon(1e-12));
  for (const PhiExtensionRow& row : rep.rows) {
    CHECK(row.certified);
    CHECK(row.tail == 0.0);
    CHECK(row.phi_margin <= 1e-12);
  }
  CHECK(rep.certified_count == 4);
  CHECK(rep.all_certified);

  const Distribution pm = fixture("point_mass", {.d = 2, .L = 6});
  const PhiExtensionReport prep = phi_extension_check(
      pm, {scalar_point(Complex(0.0, 0.4), 2), scalar_point(Complex(0.0, 30.0), 2)});
  CHECK(prep.all_certified);
}

TEST_CASE("transform extension loses the certificate near the coin flip branch point") {
  const Distribution bern = fixture("bernoulli_scalar", {.L = 8});
  const std::vector<LevelMatrix> pts{scalar_point(Complex(0.0, 1.9), 1),
                                     scalar_point(Complex(0.0, 2.5), 1),
                                     scalar_point(Complex(0.0, 20.0), 1)};
  const PhiExtensionReport rep = phi_extension_check(bern, pts);
  REQUIRE(rep.rows.size() == 3);
  CHECK_FALSE(rep.rows[0].certified);
  CHECK(rep.rows[0].tail > 1e-3);
  CHECK_FALSE(rep.rows[1].certified);
  CHECK(rep.rows[2].certified);
  CHECK(rep.rows[2].phi_margin <= 1e-12);
  CHECK(rep.certified_count == 1);
  CHECK_FALSE(rep.all_certified);
}

TEST_CASE("transform extension marks singular sample points uncertified") {
  const Distribution sc = fixture("semicircular", {.d = 1, .L = 8});
  const PhiExtensionReport rep =
      phi_extension_check(sc, {scalar_point(Complex(0.0, 0.0), 1)});
  CHECK_FALSE(rep.rows[0].certified);
  CHECK_FALSE(rep.all_certified);
}

TEST_CASE("divisibility verdicts survive convolution and the semigroup") {
  const Distribution a = fixture("semicircular", {.d = 2, .L = 6});
  const Distribution b = fixture("point_mass", {.d = 2, .L = 6});
  CHECK(is_infinitely_divisible(convolve(a, b)).pass);
  CHECK(is_infinitely_divisible(semigroup_apply(a, CPMap::scaled_identity(0.3, 2))).pass);
  CHECK(is_infinitely_divisible(semigroup_apply(a, conjugation_map(random_matrix(2, 33)))).pass);
}
