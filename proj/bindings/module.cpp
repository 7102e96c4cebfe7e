// Python bindings for the main operations: fixtures, transform evaluation,
// certification, convolution, divisibility, and density tables. Matrices
// cross the boundary as complex numpy arrays; points in M_n(B) arrive as
// one nd x nd array with n inferred from the shape.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freeprob/divisibility.hpp"
#include "freeprob/errors.hpp"
#include "freeprob/inversion.hpp"
#include "freeprob/json_io.hpp"
#include "freeprob/transforms.hpp"

namespace py = pybind11;
using namespace freeprob;

namespace {

LevelMatrix level_from(int d, const Matrix& b) {
  if (b.rows() != b.cols() || d < 1 || b.rows() % d != 0)
    throw DimensionMismatch("point must be a square nd x nd matrix");
  return {d, int(b.rows() / d), b};
}

Distribution make_fixture(const std::string& name, int d, int L, double var,
                          std::optional<Matrix> b0, int m, std::uint64_t seed) {
  FixtureParams p;
  p.d = d;
  p.L = L;
  p.var = var;
  p.m = m;
  p.seed = seed;
  if (b0) {
    p.b0 = *b0;
    p.d = int(b0->rows());
  }
  return fixture(name, p);
}

std::vector<Matrix> map_ops(const std::vector<MultilinearMap>& maps) {
  std::vector<Matrix> out;
  out.reserve(maps.size());
  for (const MultilinearMap& T : maps) out.push_back(T.op);
  return out;
}

Json parse_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON text");
  return j;
}

}  // namespace

PYBIND11_MODULE(_freeprob, mod) {
  mod.doc() =
      "Numerical transforms of operator-valued free probability over M_d(C): "
      "Cauchy, reciprocal Cauchy and Voiculescu transform evaluation, "
      "certified inversion, free additive convolution, infinite-divisibility "
      "tests, and spectral density tables.";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::Parse:
          PyErr_SetString(PyExc_ValueError, e.what());
          return;
        case ErrorKind::NumericDomain:
          PyErr_SetString(PyExc_ArithmeticError, e.what());
          return;
        case ErrorKind::Precondition:
          PyErr_SetString(PyExc_RuntimeError, e.what());
          return;
      }
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  py::class_<Distribution>(mod, "Distribution",
                           "B-valued distribution truncated at moment order L.")
      .def_readonly("d", &Distribution::d)
      .def_readonly("L", &Distribution::L)
      .def_readonly("M", &Distribution::M, "Exponential moment-growth witness.")
      .def_property_readonly(
          "moments", [](const Distribution& mu) { return map_ops(mu.moments); },
          "Interior moment maps as flat d^2 x d^(2k) matrices; entry k has arity k.")
      .def_property_readonly(
          "cumulants", [](const Distribution& mu) { return map_ops(mu.cumulants); },
          "Free cumulant maps in the same layout as moments.")
      .def_property_readonly(
          "mean", [](const Distribution& mu) { return mu.cumulants.at(0).constant_value(); })
      .def("to_json", [](const Distribution& mu) { return to_json(mu).dump(2); })
      .def_static(
          "from_json",
          [](const std::string& text) { return distribution_from_json(parse_text(text)); },
          py::arg("text"))
      .def("__repr__", [](const Distribution& mu) {
        return "<Distribution d=" + std::to_string(mu.d) + " L=" + std::to_string(mu.L) + ">";
      });

  py::class_<NCSeries>(mod, "Series",
                       "Truncated non-commutative power series with multilinear coefficients.")
      .def_readonly("d", &NCSeries::d)
      .def_readonly("L", &NCSeries::L)
      .def_property_readonly(
          "coeffs", [](const NCSeries& s) { return map_ops(s.coeffs); })
      .def("to_json", [](const NCSeries& s) { return to_json(s).dump(2); })
      .def_static(
          "from_json",
          [](const std::string& text) { return series_from_json(parse_text(text)); },
          py::arg("text"))
      .def("__repr__", [](const NCSeries& s) {
        return "<Series d=" + std::to_string(s.d) + " L=" + std::to_string(s.L) + ">";
      });

  py::class_<CauchyReport>(mod, "CauchyReport")
      .def_readonly("identity_ok", &CauchyReport::identity_ok)
      .def_readonly("identity_residual", &CauchyReport::identity_residual)
      .def_readonly("bimodular_residual", &CauchyReport::bimodular_residual)
      .def_readonly("bound_M", &CauchyReport::bound_M)
      .def_readonly("gram_min_eig", &CauchyReport::gram_min_eig)
      .def_readonly("passed", &CauchyReport::pass);

  py::class_<CauchyCertification>(mod, "CauchyCertification")
      .def_readonly("report", &CauchyCertification::report)
      .def_readonly("mu", &CauchyCertification::mu,
                    "Recovered distribution, present exactly on PASS.");

  py::class_<Sigma0Report>(mod, "Sigma0Report")
      .def_readonly("identity_residual", &Sigma0Report::identity_residual)
      .def_readonly("bound_M", &Sigma0Report::bound_M)
      .def_readonly("gram_min_eig", &Sigma0Report::gram_min_eig)
      .def_readonly("passed", &Sigma0Report::pass);

  py::class_<VoiculescuReport>(mod, "VoiculescuReport")
      .def_readonly("sigma0", &VoiculescuReport::sigma0)
      .def_readonly("div_gram_min_eig", &VoiculescuReport::div_gram_min_eig)
      .def_readonly("phi_residual", &VoiculescuReport::phi_residual)
      .def_readonly("passed", &VoiculescuReport::pass);

  py::class_<VoiculescuCertification>(mod, "VoiculescuCertification")
      .def_readonly("report", &VoiculescuCertification::report)
      .def_readonly("mu", &VoiculescuCertification::mu);

  py::class_<DivisibilityReport>(mod, "DivisibilityReport")
      .def_readonly("gram_min_eig", &DivisibilityReport::gram_min_eig)
      .def_readonly("passed", &DivisibilityReport::pass);

  mod.def("fixture", &make_fixture, py::arg("name"), py::arg("d") = 1, py::arg("L") = 6,
          py::arg("var") = 1.0, py::arg("b0") = std::nullopt, py::arg("m") = 2,
          py::arg("seed") = 0,
          "Named example distributions: semicircular, point_mass, bernoulli_scalar, "
          "independent_diagonal, realization_random.");

  mod.def(
      "cauchy",
      [](const Distribution& mu, const Matrix& b) {
        return cauchy_eval(mu, level_from(mu.d, b)).mat;
      },
      py::arg("mu"), py::arg("b"),
      "Cauchy transform at a point of M_n(B); exact backend when the "
      "distribution carries one, moment series otherwise.");

  mod.def(
      "f_transform",
      [](const Distribution& mu, const Matrix& b) {
        return f_transform_eval(mu, level_from(mu.d, b)).mat;
      },
      py::arg("mu"), py::arg("b"), "Reciprocal Cauchy transform F = G^{-1}.");

  mod.def(
      "voiculescu",
      [](const Distribution& mu, const Matrix& b) {
        return voiculescu_eval(mu, level_from(mu.d, b)).mat;
      },
      py::arg("mu"), py::arg("b"),
      "Voiculescu transform phi(b) = F^{<-1>}(b) - b by certified Newton inversion.");

  mod.def(
      "density",
      [](const Distribution& mu, const std::vector<double>& xs, double y, int workers) {
        std::vector<std::pair<double, double>> out;
        for (const DensityRow& row : stieltjes_density(mu, xs, y, workers))
          out.emplace_back(row.x, row.density);
        return out;
      },
      py::arg("mu"), py::arg("xs"), py::arg("y") = 1e-2, py::arg("workers") = 1,
      "Regularized spectral density -(1/pi) Im tr G(x + iy) as (x, density) pairs.");

  mod.def("h_series", &h_series_from_moments, py::arg("mu"),
          "Moment germ h with h(w) = G(w^{-1}) near 0.");
  mod.def("r_series", &r_series, py::arg("mu"),
          "Cumulant series; arity-ell coefficient is the order ell+1 cumulant.");
  mod.def("counterexample_series", &counterexample_K_series, py::arg("L"),
          "Germ with correct diagonal asymptotics that fails transform certification.");

  mod.def(
      "certify_cauchy",
      [](const NCSeries& h, int degree, double tol) { return certify_cauchy(h, degree, tol); },
      py::arg("h"), py::arg("degree") = 3, py::arg("tol") = 1e-8,
      "Decide whether h is the germ of a Cauchy transform; on PASS the result "
      "carries the recovered distribution.");

  mod.def(
      "certify_voiculescu",
      [](const NCSeries& phi, int degree, double tol) {
        return certify_voiculescu(phi, degree, tol);
      },
      py::arg("phi"), py::arg("degree") = 3, py::arg("tol") = 1e-8,
      "Decide whether phi is the Voiculescu transform of an infinitely "
      "divisible distribution.");

  mod.def("convolve", &convolve, py::arg("a"), py::arg("b"),
          "Free additive convolution through cumulant addition.");

  mod.def("convolution_root", &convolution_root, py::arg("mu"), py::arg("k"),
          py::arg("degree") = 3, py::arg("tol") = 1e-10,
          "nu with nu convolved k times equal to mu; requires infinite divisibility.");

  mod.def(
      "semigroup_apply",
      [](const Distribution& mu, const Matrix& op, int degree, double tol) {
        if (op.rows() != op.cols() || op.rows() != Eigen::Index(mu.d) * mu.d)
          throw DimensionMismatch("semigroup map must be d^2 x d^2");
        return semigroup_apply(mu, CPMap{mu.d, op}, degree, tol);
      },
      py::arg("mu"), py::arg("op"), py::arg("degree") = 3, py::arg("tol") = 1e-10,
      "Push the cumulants through a completely positive map given as its "
      "d^2 x d^2 matrix on vectorized input.");

  mod.def("is_infinitely_divisible", &is_infinitely_divisible, py::arg("mu"),
          py::arg("degree") = 3, py::arg("tol") = 1e-10);

  mod.def("certify_sigma0", &certify_sigma0, py::arg("mu"), py::arg("degree") = 3,
          py::arg("tol") = 1e-10,
          "State conditions up to Gram degree: identity on B, exponential "
          "bound, complete positivity of the moment Gram matrix.");
}
