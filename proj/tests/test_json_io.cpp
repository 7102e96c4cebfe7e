#include <cstdio>
#include <random>

#include "doctest.h"
#include "freeprob/errors.hpp"
#include "freeprob/json_io.hpp"

using namespace freeprob;

namespace {

LevelMatrix random_level(int d, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  LevelMatrix b(d, n);
  for (Eigen::Index i = 0; i < b.mat.rows(); ++i)
    for (Eigen::Index j = 0; j < b.mat.cols(); ++j) b.mat(i, j) = Complex(g(rng), g(rng));
  return b;
}

}  // namespace

TEST_CASE("level matrix JSON round trip is exact") {
  const LevelMatrix b = random_level(2, 2, 7);
  const LevelMatrix back = level_from_json(to_json(b));
  CHECK(back.d == 2);
  CHECK(back.n == 2);
  CHECK(op_norm(Matrix(back.mat - b.mat)) == 0.0);
}

TEST_CASE("series JSON round trip keeps coefficients and tail bound") {
  const Distribution mu = fixture("semicircular", {.d = 2, .L = 6});
  const NCSeries h = h_series_from_moments(mu);
  const NCSeries back = series_from_json(to_json(h));
  CHECK(back.d == h.d);
  CHECK(back.L == h.L);
  REQUIRE(back.tail_bound.has_value());
  CHECK(*back.tail_bound == *h.tail_bound);
  for (int ell = 0; ell <= h.L; ++ell)
    CHECK(op_norm(Matrix(back.coeffs[std::size_t(ell)].op - h.coeffs[std::size_t(ell)].op)) == 0.0);

  // The parsed series still certifies.
  CHECK(certify_cauchy(back, 3).report.pass);
}

TEST_CASE("distribution JSON round trip restores the exact backend") {
  const Distribution mu = fixture("realization_random", {.d = 2, .L = 6, .m = 2, .seed = 3});
  const Distribution back = distribution_from_json(to_json(mu));
  CHECK(back.d == mu.d);
  CHECK(back.L == mu.L);
  CHECK(back.M == mu.M);
  for (std::size_t k = 0; k < mu.moments.size(); ++k)
    CHECK(op_norm(Matrix(back.moments[k].op - mu.moments[k].op)) == 0.0);
  for (std::size_t k = 0; k < mu.cumulants.size(); ++k)
    CHECK(op_norm(Matrix(back.cumulants[k].op - mu.cumulants[k].op)) == 0.0);
  REQUIRE(back.realization.has_value());
  REQUIRE(back.exact_resolvent);

  const LevelMatrix b = LevelMatrix::scalar(Complex(0.3, 2.0), 2);
  CHECK(op_norm(Matrix(cauchy_eval(back, b).mat - cauchy_eval(mu, b).mat)) == 0.0);
}

TEST_CASE("distribution JSON accepts cumulants alone") {
  const Distribution mu = fixture("semicircular", {.d = 1, .L = 6});
  Json j = to_json(mu);
  j.erase("moments");
  const Distribution back = distribution_from_json(j);
  for (std::size_t k = 0; k < mu.moments.size(); ++k)
    CHECK(op_norm(Matrix(back.moments[k].op - mu.moments[k].op)) < 1e-14);
}

TEST_CASE("CP map JSON round trip") {
  CPMap rho{2, Matrix(4, 4)};
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rho.op(i, j) = Complex(g(rng), g(rng));
  const CPMap back = cpmap_from_json(to_json(rho));
  CHECK(back.d == 2);
  CHECK(op_norm(Matrix(back.op - rho.op)) == 0.0);
}

TEST_CASE("certificate JSON uses null for an infinite uniqueness radius") {
  KantorovichCertificate cert;
  cert.eta = 0.25;
  cert.t_star_star = std::numeric_limits<double>::infinity();
  cert.converged = true;
  const Json j = to_json(cert);
  CHECK(j["eta"] == 0.25);
  CHECK(j["t_star_star"].is_null());
  CHECK(j["converged"] == true);
}

TEST_CASE("malformed input raises ParseError") {
  CHECK_THROWS_AS(level_from_json(Json::array()), ParseError);
  CHECK_THROWS_AS(level_from_json(Json{{"d", 2}}), ParseError);

  Json bad = to_json(random_level(2, 1, 9));
  bad["re"][0].erase(1);
  CHECK_THROWS_AS(level_from_json(bad), ParseError);

  const Distribution mu = fixture("semicircular", {.d = 1, .L = 4});
  Json dj = to_json(mu);
  dj.erase("M");
  CHECK_THROWS_AS(distribution_from_json(dj), ParseError);
  dj = to_json(mu);
  dj["moments"][2]["ell"] = 5;
  CHECK_THROWS_AS(distribution_from_json(dj), ParseError);
  dj = to_json(mu);
  dj.erase("moments");
  dj.erase("cumulants");
  CHECK_THROWS_AS(distribution_from_json(dj), ParseError);

  Json sj = to_json(h_series_from_moments(mu));
  sj["coeffs"][1]["ell"] = 0;
  CHECK_THROWS_AS(series_from_json(sj), ParseError);
}

TEST_CASE("file round trip and file errors") {
  const std::string path = "/tmp/freeprob_json_io_test.json";
  const Distribution mu = fixture("semicircular", {.d = 1, .L = 4});
  save_json(to_json(mu), path);
  const Distribution back = distribution_from_json(load_json(path));
  CHECK(back.L == 4);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_json("/tmp/does_not_exist_freeprob.json"), ParseError);
  const std::string broken = "/tmp/freeprob_broken.json";
  {
    std::FILE* f = std::fopen(broken.c_str(), "w");
    REQUIRE(f);
    std::fputs("{not json", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_json(broken), ParseError);
  std::remove(broken.c_str());
}
