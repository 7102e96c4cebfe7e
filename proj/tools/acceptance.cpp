// Acceptance suite: ten numbered criteria, each printing one PASS/FAIL line
// with the measured quantities. Runs all by default; --criterion N runs one.
// Exit code 0 when every selected criterion passes, 1 otherwise.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freeprob/divisibility.hpp"
#include "freeprob/errors.hpp"
#include "freeprob/inversion.hpp"
#include "freeprob/transforms.hpp"

using namespace freeprob;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

LevelMatrix scalar_point(Complex z, int d) { return LevelMatrix::scalar(z, d); }

// Two-block diagonal level-2 point with floors y and y + 0.7.
LevelMatrix stacked_point(Complex z, int d) {
  LevelMatrix b(d, 2);
  b.block(0, 0) = z * Matrix::Identity(d, d);
  b.block(1, 1) = (z + Complex(0.0, 0.7)) * Matrix::Identity(d, d);
  return b;
}

CPMap conjugation_map(const Matrix& A) {
  const int d = int(A.rows());
  CPMap rho{d, Matrix::Zero(Eigen::Index(d) * d, Eigen::Index(d) * d)};
  for (int beta = 0; beta < d * d; ++beta)
    rho.op.col(beta) = vec(Matrix(A * matrix_unit(beta, d) * A.adjoint()));
  return rho;
}

CPMap transpose_map(int d) {
  CPMap rho{d, Matrix::Zero(Eigen::Index(d) * d, Eigen::Index(d) * d)};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rho.op(i + d * j, j + d * i) = 1.0;
  return rho;
}

// 1. Moment series vs exact transform, within the reported tail bound at 50
// points above 5 ||a||, and to 1e-8 above 20 ||a||.
Outcome criterion_1() {
  struct Case {
    std::string name;
    Distribution mu;
    std::function<LevelMatrix(const LevelMatrix&)> reference;
  };
  std::vector<Case> cases;
  {
    Distribution mu = fixture("independent_diagonal", {.d = 2, .L = 6});
    auto ref = mu.exact_resolvent;
    cases.push_back({"independent_diagonal", std::move(mu), std::move(ref)});
  }
  {
    Distribution mu = fixture("realization_random", {.d = 2, .L = 6, .m = 2, .seed = 1});
    const Realization r = *mu.realization;
    cases.push_back({"realization_random", std::move(mu),
                     [r](const LevelMatrix& b) { return cauchy_eval_realization(r, b); }});
  }

  double worst_ratio = 0.0, far_max = 0.0;
  int far_points = 0;
  for (const Case& c : cases) {
    const double a = c.mu.M;
    for (int j = 0; j < 50; ++j) {
      const double y = a * (5.0 + 0.5 * j);
      const Complex z(0.3 * std::cos(double(j)), y);
      const LevelMatrix b = (j % 2 == 0) ? scalar_point(z, c.mu.d) : stacked_point(z, c.mu.d);
      if (spectrum_floor(b) < 5.0 * a) return {false, "point grid fell below the floor"};
      const SeriesValue sv = cauchy_eval_series(c.mu, b);
      const double diff = op_norm(Matrix(sv.value.mat - c.reference(b).mat));
      if (diff > sv.tail)
        return {false, c.name + ": diff " + num(diff) + " exceeds tail " + num(sv.tail) +
                           " at floor " + num(y)};
      if (sv.tail > 0.0) worst_ratio = std::max(worst_ratio, diff / sv.tail);
      if (spectrum_floor(b) >= 20.0 * a) {
        ++far_points;
        far_max = std::max(far_max, diff);
      }
    }
  }
  if (far_points < 20) return {false, "only " + std::to_string(far_points) + " far points"};
  if (far_max > 1e-8) return {false, "far-point diff " + num(far_max) + " > 1e-8"};
  return {true, "50 points x 2 fixtures, max diff/tail " + num(worst_ratio) + ", far max " +
                    num(far_max) + " over " + std::to_string(far_points) + " points"};
}

// 2. certify_cauchy on the moment germ recovers the moments to 1e-10 in
// under ten seconds per fixture.
Outcome criterion_2() {
  std::vector<std::pair<std::string, Distribution>> cases;
  cases.emplace_back("semicircular", fixture("semicircular", {.d = 2, .L = 6}));
  cases.emplace_back("point_mass", fixture("point_mass", {.d = 2, .L = 6}));
  cases.emplace_back("realization_random",
                     fixture("realization_random", {.d = 2, .L = 6, .m = 2, .seed = 7}));

  double worst = 0.0, slowest = 0.0;
  for (const auto& [name, mu] : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const CauchyCertification res = certify_cauchy(h_series_from_moments(mu), 3);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slowest = std::max(slowest, dt);
    if (!res.report.pass || !res.mu)
      return {false, name + ": certification FAILed, gram min eig " +
                         num(res.report.gram_min_eig)};
    if (dt >= 10.0) return {false, name + ": took " + num(dt) + " s"};
    double diff = 0.0;
    for (std::size_t k = 0; k < mu.moments.size() && k < res.mu->moments.size(); ++k)
      diff = std::max(diff, op_norm(Matrix(res.mu->moments[k].op - mu.moments[k].op)));
    if (diff > 1e-10) return {false, name + ": moment gap " + num(diff) + " > 1e-10"};
    worst = std::max(worst, diff);
  }
  return {true, "3 fixtures, max moment gap " + num(worst) + ", slowest " + num(slowest) + " s"};
}

// 3. The half-plane map with correct diagonal asymptotics: passes the ray
// test along diagonal directions, fails along a skew direction with the
// predicted limit, and fails transform certification on the identity
// condition.
Outcome criterion_3() {
  const auto H = [](const LevelMatrix& b) { return counterexample_H(b); };
  const std::vector<double> grid{10.0, 100.0, 1000.0};

  const AsymptoticsReport diag_i = asymptotics_check(H, Matrix::Identity(2, 2), grid);
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 2.0;
  const AsymptoticsReport diag_d = asymptotics_check(H, D, grid);
  if (!diag_i.pass || diag_i.rows.back().residual >= 1e-2)
    return {false, "identity ray residual " + num(diag_i.rows.back().residual)};
  if (!diag_d.pass || diag_d.rows.back().residual >= 1e-2)
    return {false, "diag(1,2) ray residual " + num(diag_d.rows.back().residual)};

  Matrix Q(2, 2);
  Q << Complex(2.0), Complex(1.0), Complex(1.0), Complex(1.0);
  const AsymptoticsReport skew = asymptotics_check(H, Q, grid);
  const Matrix Qinv = inverse(Q);
  Matrix diag_part = Matrix::Zero(2, 2);
  diag_part(0, 0) = Qinv(0, 0);
  diag_part(1, 1) = Qinv(1, 1);
  const double limit = op_norm(Matrix(Q * diag_part - Matrix::Identity(2, 2)));
  const double last = skew.rows.back().residual;
  if (skew.pass) return {false, "skew ray unexpectedly passed"};
  if (limit <= 0.1) return {false, "skew limit " + num(limit) + " not > 0.1"};
  if (std::abs(last - limit) > 1e-2)
    return {false, "skew residual " + num(last) + " vs limit " + num(limit)};

  const CauchyCertification cert = certify_cauchy(counterexample_K_series(7), 3);
  if (cert.report.identity_ok || cert.report.pass)
    return {false, "counterexample germ was not rejected on the identity condition"};
  return {true, "diagonal residuals " + num(diag_i.rows.back().residual) + "/" +
                    num(diag_d.rows.back().residual) + ", skew " + num(last) + " vs limit " +
                    num(limit) + ", germ identity residual " +
                    num(cert.report.identity_residual)};
}

// 4. Fixed-point iteration vs the closed-form reciprocal Cauchy transform of
// the semicircle at 20 half-plane points, within 60 iterations each.
Outcome criterion_4() {
  const auto recip = [](const LevelMatrix& w) { return inverse(w); };
  double worst = 0.0;
  int max_iters = 0;
  for (int j = 0; j < 20; ++j) {
    const Complex z(-3.0 + 6.0 * j / 19.0, 1.0 + 0.25 * (j % 4));
    int iters = 0;
    const LevelMatrix w = earle_hamilton(recip, scalar_point(z, 1), 1e-12, 500, &iters);
    const Complex s = std::sqrt(z * z - 4.0);
    const Complex w1 = (z - s) / 2.0, w2 = (z + s) / 2.0;
    const Complex closed = std::abs(w1) >= std::abs(w2) ? w1 : w2;
    worst = std::max(worst, std::abs(w.mat(0, 0) - closed));
    max_iters = std::max(max_iters, iters);
  }
  if (worst > 1e-10) return {false, "max closed-form gap " + num(worst) + " > 1e-10"};
  if (max_iters > 60) return {false, std::to_string(max_iters) + " iterations > 60"};
  return {true, "20 points, max gap " + num(worst) + ", max iterations " +
                    std::to_string(max_iters)};
}

// 5. Newton certificates satisfy their defining formulas bitwise and the
// root stays within t_star of the first iterate.
Outcome criterion_5() {
  struct Case {
    std::string name;
    NCMap f;
    LevelMatrix target;
    LevelMatrix x0;
  };
  std::vector<Case> cases;
  {
    NCSeries s(1, 1);
    Matrix c(1, 1);
    c(0, 0) = 0.3;
    s.coeffs[0] = MultilinearMap::constant(c);
    s.coeffs[1] = MultilinearMap::identity(1);
    s.coeffs[1].op *= 2.0;
    cases.push_back({"affine", map_from_series(std::move(s)),
                     scalar_point(Complex(1.0, 0.0), 1), scalar_point(Complex(0.0, 0.0), 1)});
  }
  {
    NCSeries s(1, 2);
    s.coeffs[1] = MultilinearMap::identity(1);
    s.coeffs[2].op(0, 0) = 1.0;
    cases.push_back({"quadratic", map_from_series(std::move(s)),
                     scalar_point(Complex(0.1, 0.0), 1), scalar_point(Complex(0.0, 0.0), 1)});
  }
  {
    const LevelMatrix b = scalar_point(Complex(0.0, 5.0), 1);
    cases.push_back({"semicircular F",
                     f_map_from_distribution(fixture("semicircular", {.d = 1, .L = 6})), b, b});
  }
  {
    const LevelMatrix b = scalar_point(Complex(0.4, 6.0), 2);
    cases.push_back({"point-mass F",
                     f_map_from_distribution(fixture("point_mass", {.d = 2, .L = 6})), b, b});
  }

  double worst_slack = 0.0;
  for (const Case& c : cases) {
    const NewtonResult res = newton_invert(c.f, c.target, c.x0);
    const KantorovichCertificate& k = res.cert;
    if (!k.converged) return {false, c.name + ": did not converge"};
    if (k.h != k.K * k.eta) return {false, c.name + ": h is not K * eta"};
    if (k.h > 0.5) return {false, c.name + ": h " + num(k.h) + " > 1/2"};
    const double disc = std::sqrt(1.0 - 2.0 * k.h);
    if (k.t_star != 2.0 * k.eta / (1.0 + disc))
      return {false, c.name + ": t_star formula mismatch"};
    if (k.K > 0.0) {
      if (k.t_star_star != (1.0 + disc) / k.K)
        return {false, c.name + ": t_star_star formula mismatch"};
    } else if (!std::isinf(k.t_star_star)) {
      return {false, c.name + ": K = 0 needs an infinite uniqueness radius"};
    }
    const double dist = (res.root.mat - res.first_iterate.mat).norm();
    if (dist > k.t_star + 1e-12)
      return {false, c.name + ": root is " + num(dist) + " from the first iterate, t_star " +
                         num(k.t_star)};
    worst_slack = std::max(worst_slack, dist - k.t_star);
  }
  return {true, "4 inversions, formulas bitwise, max (dist - t_star) " + num(worst_slack)};
}

// 6. Partition-route and series-inversion cumulants agree to 1e-10 on 20
// random order-6 realizations over M_2.
Outcome criterion_6() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Distribution mu = fixture("realization_random", {.d = 2, .L = 6, .m = 2, .seed = seed});
    const std::vector<MultilinearMap> via_series = cumulants_via_series_inversion(mu);
    for (std::size_t k = 0; k < mu.cumulants.size() && k < via_series.size(); ++k)
      worst = std::max(worst, op_norm(Matrix(mu.cumulants[k].op - via_series[k].op)));
  }
  if (worst > 1e-10) return {false, "max route gap " + num(worst) + " > 1e-10"};
  return {true, "20 seeds, max route gap " + num(worst)};
}

// 7. Divisibility verdicts: semicircular passes, scalar Bernoulli fails
// hard, and every d = 1 verdict equals the Hankel criterion.
Outcome criterion_7() {
  const DivisibilityReport sc = is_infinitely_divisible(fixture("semicircular", {.d = 2, .L = 6}));
  if (!sc.pass || sc.gram_min_eig < -1e-10)
    return {false, "semicircular gram min eig " + num(sc.gram_min_eig)};

  const DivisibilityReport bern = is_infinitely_divisible(fixture("bernoulli_scalar", {.L = 6}));
  if (bern.pass || bern.gram_min_eig > -0.5)
    return {false, "Bernoulli gram min eig " + num(bern.gram_min_eig) + " not <= -0.5"};

  std::vector<std::pair<std::string, Distribution>> scalars;
  scalars.emplace_back("semicircular", fixture("semicircular", {.d = 1, .L = 6}));
  scalars.emplace_back("bernoulli_scalar", fixture("bernoulli_scalar", {.L = 6}));
  {
    FixtureParams p;
    p.L = 6;
    p.b0 = Matrix::Constant(1, 1, Complex(0.7, 0.0));
    scalars.emplace_back("point_mass", fixture("point_mass", p));
  }
  scalars.emplace_back("realization_random",
                       fixture("realization_random", {.d = 1, .L = 6, .m = 3, .seed = 11}));

  double worst_gap = 0.0;
  for (const auto& [name, mu] : scalars) {
    const DivisibilityReport rep = is_infinitely_divisible(mu, 3);
    Matrix H(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) H(i, j) = mu.cumulants[std::size_t(i + j + 1)].op(0, 0);
    const double hankel_min = min_eig_hermitian(H);
    if (rep.pass != (hankel_min >= -1e-10))
      return {false, name + ": verdict disagrees with the Hankel criterion (" +
                         num(rep.gram_min_eig) + " vs " + num(hankel_min) + ")"};
    worst_gap = std::max(worst_gap, std::abs(rep.gram_min_eig - hankel_min));
  }
  return {true, "semicircular min eig " + num(sc.gram_min_eig) + ", Bernoulli " +
                    num(bern.gram_min_eig) + ", 4 scalar fixtures match Hankel, max eig gap " +
                    num(worst_gap)};
}

// 8. Semigroup laws: half-convolution squares back to the original,
// composition is associative on the cumulants, and a non-CP map is refused.
Outcome criterion_8() {
  const Distribution mu = fixture("semicircular", {.d = 2, .L = 6});

  const Distribution half = semigroup_apply(mu, CPMap::scaled_identity(0.5, 2));
  const Distribution rec = convolve(half, half);
  double moment_gap = 0.0;
  for (std::size_t k = 0; k < mu.moments.size() && k < rec.moments.size(); ++k)
    moment_gap = std::max(moment_gap, op_norm(Matrix(rec.moments[k].op - mu.moments[k].op)));
  if (moment_gap > 1e-9) return {false, "half-convolution square gap " + num(moment_gap)};

  Matrix A1(2, 2), A2(2, 2);
  A1 << Complex(1.0), Complex(0.5), Complex(0.0), Complex(1.0);
  A2 << Complex(0.8), Complex(0.0), Complex(0.3), Complex(1.1);
  const CPMap rho1 = conjugation_map(A1), rho2 = conjugation_map(A2);
  CPMap composed{2, Matrix(rho2.op * rho1.op)};
  const Distribution lhs = semigroup_apply(semigroup_apply(mu, rho1), rho2);
  const Distribution rhs = semigroup_apply(mu, composed);
  double cum_gap = 0.0;
  for (std::size_t k = 0; k < lhs.cumulants.size() && k < rhs.cumulants.size(); ++k)
    cum_gap = std::max(cum_gap, op_norm(Matrix(lhs.cumulants[k].op - rhs.cumulants[k].op)));
  if (cum_gap > 1e-13) return {false, "associativity cumulant gap " + num(cum_gap)};

  bool rejected = false;
  try {
    semigroup_apply(mu, transpose_map(2));
  } catch (const NotCP&) {
    rejected = true;
  }
  if (!rejected) return {false, "transpose map was not rejected"};
  return {true, "square gap " + num(moment_gap) + ", associativity gap " + num(cum_gap) +
                    ", non-CP map rejected"};
}

// 9. Regularized density of the standard semicircle matches the closed form
// to 5e-3 across |x| <= 1.8.
Outcome criterion_9() {
  const Distribution mu = fixture("semicircular", {.d = 1, .L = 6});
  std::vector<double> xs;
  for (int i = 0; i <= 72; ++i) xs.push_back(-1.8 + 0.05 * i);
  const std::vector<DensityRow> rows = stieltjes_density(mu, xs, 1e-2);
  double worst = 0.0;
  for (const DensityRow& row : rows) {
    const double exact = std::sqrt(4.0 - row.x * row.x) / (2.0 * M_PI);
    worst = std::max(worst, std::abs(row.density - exact));
  }
  if (worst > 5e-3) return {false, "max density error " + num(worst) + " > 5e-3"};
  return {true, std::to_string(rows.size()) + " grid points, max density error " + num(worst)};
}

// 10. Additivity of the Voiculescu transform under free convolution at 20
// certified points across two fixture pairs.
Outcome criterion_10() {
  struct Pair {
    std::string name;
    Distribution a, b;
  };
  std::vector<Pair> pairs;
  pairs.push_back({"semicircular+point_mass", fixture("semicircular", {.d = 2, .L = 6}),
                   fixture("point_mass", {.d = 2, .L = 6})});
  pairs.push_back({"semicircular+bernoulli", fixture("semicircular", {.d = 1, .L = 6}),
                   fixture("bernoulli_scalar", {.L = 6})});

  double worst = 0.0;
  int points = 0;
  for (const Pair& p : pairs) {
    const Distribution sum = convolve(p.a, p.b);
    struct Leg {
      NCMap f;
      Matrix mean;
    };
    std::vector<Leg> legs;
    for (const Distribution* mu : {&p.a, &p.b, &sum})
      legs.push_back({f_map_from_distribution(*mu), mu->cumulants[0].constant_value()});
    for (int j = 0; j < 10; ++j) {
      // High enough that the dropped germ tail of the convolved pair,
      // growing like 4^ell against y^-ell, sits below the tolerance.
      const Complex z(j % 2 == 0 ? 0.4 : -0.4, 60.0 + 4.0 * j);
      const LevelMatrix b = scalar_point(z, p.a.d);
      LevelMatrix phi_sum(b.d, b.n);
      Matrix total = Matrix::Zero(b.dim(), b.dim());
      for (std::size_t leg = 0; leg < legs.size(); ++leg) {
        // F^{-1}(b) = b + mean + O(1/y); starting there keeps the Newton
        // certificate spheres away from the singular set.
        LevelMatrix x0 = b;
        x0.mat += amplify(legs[leg].mean, b.n).mat;
        const NewtonResult res = newton_invert(legs[leg].f, b, x0);
        if (!res.cert.converged || res.cert.h > 0.5)
          return {false, p.name + ": uncertified point at " + num(z.imag())};
        if (leg == 2)
          phi_sum = res.root - b;
        else
          total += res.root.mat - b.mat;
      }
      ++points;
      worst = std::max(worst, op_norm(Matrix(phi_sum.mat - total)));
    }
  }
  if (worst > 1e-8) return {false, "max additivity residual " + num(worst) + " > 1e-8"};
  return {true, std::to_string(points) + " certified points, max additivity residual " +
                    num(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the transform library. Runs all ten by default;\n"
               "exit code 0 when every selected criterion passes, 1 otherwise."};
  int which = 0;
  app.add_option("--criterion", which, "Run a single criterion (1-10), 0 for all")
      ->check(CLI::Range(0, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Outcome (*)()> criteria{
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};

  int failures = 0;
  for (int k = 1; k <= int(criteria.size()); ++k) {
    if (which != 0 && which != k) continue;
    Outcome out;
    try {
      out = criteria[std::size_t(k - 1)]();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::cout << "criterion " << (k < 10 ? " " : "") << k << ": "
              << (out.pass ? "PASS" : "FAIL") << "  " << out.detail << "\n";
  }
  return failures == 0 ? 0 : 1;
}
