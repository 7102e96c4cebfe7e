#include <cmath>
#include <complex>

#include "doctest.h"
#include "freeprob/errors.hpp"
#include "freeprob/transforms.hpp"

using namespace freeprob;

namespace {

LevelMatrix scalar_point(Complex z, int d) { return LevelMatrix::scalar(z, d); }

// Stieltjes transform of the standard semicircle, principal branch.
Complex g_semicircle(Complex z) {
  const Complex root = std::sqrt(z * z - 4.0);
  // Pick the branch decaying at infinity.
  const Complex g1 = (z - root) / 2.0, g2 = (z + root) / 2.0;
  return std::abs(g1) <= std::abs(g2) ? g1 : g2;
}

}  // namespace

TEST_CASE("semicircular Cauchy transform matches the closed form") {
  const Distribution mu = fixture("semicircular", {.d = 2, .L = 8});
  for (const Complex z : {Complex(0.0, 2.0), Complex(0.7, 1.0), Complex(-1.3, 0.4)}) {
    const LevelMatrix G = cauchy_eval(mu, scalar_point(z, 2));
    const Complex want = g_semicircle(z);
    CHECK(op_norm(Matrix(G.mat - want * Matrix::Identity(2, 2))) < 1e-10);
  }
  // Frozen: G(2i) = i (1 - sqrt 2).
  const LevelMatrix G2i = cauchy_eval(mu, scalar_point(Complex(0.0, 2.0), 2));
  CHECK(std::abs(G2i.mat(0, 0) - Complex(0.0, 1.0 - std::sqrt(2.0))) < 1e-10);
}

TEST_CASE("series route stays within its stated tail bound") {
  const Distribution mu = fixture("semicircular", {.d = 1, .L = 8});
  const LevelMatrix b = scalar_point(Complex(0.0, 5.0), 1);
  const SeriesValue sv = cauchy_eval_series(mu, b);
  const Complex want = g_semicircle(Complex(0.0, 5.0));
  CHECK(std::abs(sv.value.mat(0, 0) - want) <= sv.tail);
  CHECK(std::abs(sv.value.mat(0, 0) - want) < 2e-6);
  CHECK(sv.tail < 1e-3);
  CHECK(sv.tail > 0.0);

  // Inside the spectral disc the series refuses.
  CHECK_THROWS_AS(cauchy_eval_series(mu, scalar_point(Complex(0.0, 1.5), 1)), OutsideConvergence);
  CHECK_THROWS_AS(cauchy_eval_series(mu, scalar_point(Complex(0.0, 0.0), 1)), OutsideConvergence);
}

TEST_CASE("route selection: exact backend on the upper half-plane, series elsewhere") {
  const Distribution mu = fixture("independent_diagonal", {.d = 2, .L = 6});
  // Margin positive and inside the series radius: only the exact route works.
  const LevelMatrix Gi = cauchy_eval(mu, scalar_point(Complex(0.0, 1.0), 2));
  const Complex want = g_semicircle(Complex(0.0, 1.0));
  CHECK(op_norm(Matrix(Gi.mat - want * Matrix::Identity(2, 2))) < 1e-10);

  // Lower half-plane: exact backend refuses, series continues.
  const LevelMatrix Glow = cauchy_eval(mu, scalar_point(Complex(0.0, -5.0), 2));
  const Complex wlow = std::conj(g_semicircle(Complex(0.0, 5.0)));
  CHECK(op_norm(Matrix(Glow.mat - wlow * Matrix::Identity(2, 2))) < 1e-4);
}

TEST_CASE("realization resolvent is liberal about the domain") {
  Matrix b0 = Matrix::Zero(2, 2);
  b0(0, 0) = 1.0;
  b0(1, 1) = 2.0;
  const Realization r{2, 1, b0};
  // Below the real axis the resolvent still exists.
  const LevelMatrix G = cauchy_eval_realization(r, scalar_point(Complex(3.0, 0.0), 2));
  CHECK(std::abs(G.mat(0, 0) - Complex(0.5, 0.0)) < 1e-12);
  CHECK(std::abs(G.mat(1, 1) - Complex(1.0, 0.0)) < 1e-12);
  // On the spectrum it does not.
  CHECK_THROWS_AS(cauchy_eval_realization(r, scalar_point(Complex(1.0, 0.0), 2)),
                  SingularResolvent);
}

TEST_CASE("F transform: frozen value and margin growth") {
  const Distribution mu = fixture("semicircular", {.d = 2, .L = 8});
  // Frozen: F(2i) = i (1 + sqrt 2).
  const LevelMatrix F = f_transform_eval(mu, scalar_point(Complex(0.0, 2.0), 2));
  CHECK(std::abs(F.mat(0, 0) - Complex(0.0, 1.0 + std::sqrt(2.0))) < 1e-10);
  for (const Complex z : {Complex(0.3, 0.8), Complex(-2.0, 1.5)}) {
    const LevelMatrix b = scalar_point(z, 2);
    const LevelMatrix Fz = f_transform_eval(mu, b);
    CHECK(half_plane_margin(Fz) >= half_plane_margin(b) - 1e-9);
  }
}

TEST_CASE("h series of the scalar semicircle") {
  const Distribution mu = fixture("semicircular", {.d = 1, .L = 8});
  const NCSeries h = h_series_from_moments(mu);
  CHECK(h.L == 9);
  REQUIRE(h.tail_bound.has_value());
  CHECK(*h.tail_bound == doctest::Approx(2.0));
  // Odd coefficients carry signed weights 1, 1, 2, 5, 14; even ones vanish.
  const double expect[10] = {0, 1, 0, 1, 0, 2, 0, 5, 0, 14};
  for (int ell = 0; ell <= 9; ++ell) {
    const double got = ell == 0 ? std::abs(h.coeffs[0].constant_value()(0, 0))
                                : std::abs(h.coeffs[std::size_t(ell)].op.sum());
    CHECK(got == doctest::Approx(expect[ell]).epsilon(1e-12));
  }
  // h(w) tracks G(1/w) inside the disc of radius 1/M.
  const LevelMatrix w = scalar_point(Complex(0.2, 0.0), 1);
  const Complex via_series = eval(h, w).mat(0, 0);
  const Complex via_g = g_semicircle(Complex(5.0, 0.0));
  CHECK(std::abs(via_series - via_g) < 2e-6);
}

TEST_CASE("asymptotics: diagonal rays pass, skew rays expose the counterexample") {
  const std::vector<double> grid{10.0, 100.0, 1000.0};
  const auto H = [](const LevelMatrix& b) { return counterexample_H(b); };

  const AsymptoticsReport along_id = asymptotics_check(H, Matrix::Identity(2, 2), grid);
  CHECK(along_id.pass);
  CHECK(along_id.rows.back().residual < 1e-2);

  Matrix Qd = Matrix::Zero(2, 2);
  Qd(0, 0) = 1.0;
  Qd(1, 1) = 2.0;
  CHECK(asymptotics_check(H, Qd, grid).pass);

  Matrix Qs(2, 2);
  Qs << Complex(2.0), Complex(1.0), Complex(1.0), Complex(1.0);
  const AsymptoticsReport skew = asymptotics_check(H, Qs, grid);
  CHECK_FALSE(skew.pass);
  // Frozen limit: || Q diag(Q^{-1}) - 1 || = (3 + sqrt 5) / 2.
  const double phi2 = (3.0 + std::sqrt(5.0)) / 2.0;
  CHECK(std::abs(skew.rows.back().residual - phi2) < 1e-2);

  // A genuine Cauchy transform passes along the same skew ray.
  const Distribution sc = fixture("semicircular", {.d = 2, .L = 6});
  const auto G = [&sc](const LevelMatrix& b) { return cauchy_eval(sc, b); };
  CHECK(asymptotics_check(G, Qs, grid).pass);
}

TEST_CASE("counterexample germ fails certification on the identity condition") {
  const NCSeries K = counterexample_K_series(7);
  CHECK(K.d == 2);
  CHECK(K.L == 7);
  // Linear coefficient is the diagonal compression, not the identity.
  Matrix compression = Matrix::Zero(4, 4);
  compression(0, 0) = 1.0;
  compression(3, 3) = 1.0;
  CHECK(op_norm(Matrix(K.coeffs[1].op - compression)) < 1e-10);
  CHECK(op_norm(K.coeffs[0].constant_value()) < 1e-12);

  const CauchyCertification cert = certify_cauchy(K, 3);
  CHECK_FALSE(cert.report.identity_ok);
  CHECK(cert.report.identity_residual == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(cert.report.pass);
  CHECK_FALSE(cert.mu.has_value());
  // Cubic terms like diag(x_1) x_2 diag(x_3) spoil the factored shape too.
  CHECK(cert.report.bimodular_residual > 0.1);
}

TEST_CASE("certification roundtrip recovers the distribution") {
  for (const char* name : {"semicircular", "independent_diagonal"}) {
    const Distribution mu = fixture(name, {.d = 2, .L = 6});
    const NCSeries h = h_series_from_moments(mu);
    const CauchyCertification cert = certify_cauchy(h, 3);
    CHECK(cert.report.identity_ok);
    CHECK(cert.report.gram_min_eig >= -1e-10);
    CHECK(cert.report.pass);
    REQUIRE(cert.mu.has_value());
    CHECK(cert.mu->L == 6);
    for (int k = 0; k < 6; ++k)
      CHECK(op_norm(Matrix(cert.mu->moments[std::size_t(k)].op -
                           mu.moments[std::size_t(k)].op)) < 1e-10);
    CHECK(cert.mu->M <= mu.M * (1.0 + 1e-6));
  }
}

TEST_CASE("certification rejects a moment family with negative Gram") {
  Distribution bad = fixture("semicircular", {.d = 2, .L = 6});
  bad.moments[3].op *= -1.0;
  const NCSeries h = h_series_from_moments(bad);
  const CauchyCertification cert = certify_cauchy(h, 3);
  CHECK(cert.report.identity_ok);
  CHECK(cert.report.gram_min_eig < -0.1);
  CHECK_FALSE(cert.report.pass);
  CHECK_FALSE(cert.mu.has_value());
}

TEST_CASE("certification preconditions") {
  const Distribution mu = fixture("semicircular", {.d = 1, .L = 6});
  NCSeries h = h_series_from_moments(mu);
  CHECK_THROWS_AS(certify_cauchy(h, 4), InsufficientOrder);
  h.coeffs[0] = MultilinearMap::constant(Matrix::Identity(1, 1) * 0.5);
  CHECK_THROWS_AS(certify_cauchy(h, 3), NotNormalized);
}

TEST_CASE("regularized density of the semicircle") {
  const Distribution mu = fixture("semicircular", {.d = 1, .L = 6});
  const std::vector<double> xs{-1.0, 0.0, 1.0};
  const auto rows = stieltjes_density(mu, xs, 1e-2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].x == 0.0);
  CHECK(std::abs(rows[1].density - 1.0 / M_PI) < 2e-3);
  // Semicircle symmetry.
  CHECK(rows[0].density == doctest::Approx(rows[2].density).epsilon(1e-9));

  // Identical output regardless of the worker count.
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(-2.5 + i * 0.125);
  const auto one = stieltjes_density(mu, grid, 1e-2, 1);
  const auto four = stieltjes_density(mu, grid, 1e-2, 4);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].x == four[i].x);
    CHECK(one[i].density == four[i].density);
  }
}

TEST_CASE("density through the series route works only off the spectrum") {
  Distribution mu = fixture("semicircular", {.d = 1, .L = 8});
  mu.exact_resolvent = nullptr;
  const auto rows = stieltjes_density(mu, {5.0}, 1e-2);
  CHECK(std::abs(rows[0].density) < 1e-3);
  CHECK_THROWS_AS(stieltjes_density(mu, {0.0}, 1e-2), OutsideConvergence);
  CHECK_THROWS_AS(stieltjes_density(mu, {5.0}, 0.0), DomainError);
}
