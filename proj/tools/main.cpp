// Command-line front end: JSON in, JSON out, CSV for density tables.
//
// Exit codes: 0 success / certified PASS, 1 certified FAIL,
// 2 parse or usage error, 3 numeric domain error, 4 precondition violation.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "freeprob/divisibility.hpp"
#include "freeprob/errors.hpp"
#include "freeprob/inversion.hpp"
#include "freeprob/json_io.hpp"
#include "freeprob/transforms.hpp"

using namespace freeprob;

namespace {

std::vector<double> parse_reals(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(',', pos);
    const std::string tok = text.substr(pos, next == std::string::npos ? next : next - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError(std::string("cannot parse ") + what + " entry '" + tok + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (out.empty()) throw ParseError(std::string(what) + " list is empty");
  return out;
}

// Distribution input: either a JSON file or a named fixture.
struct SourceOpts {
  std::string input;
  std::string fixture_name;
  int d = 1;
  int L = 6;
  double var = 1.0;
  std::string b0;
  int m = 2;
  std::uint64_t seed = 0;
};

void add_source_flags(CLI::App* cmd, SourceOpts& o) {
  cmd->add_option("--input", o.input, "Distribution JSON file");
  cmd->add_option("--fixture", o.fixture_name,
                  "Fixture: semicircular, point_mass, bernoulli_scalar, "
                  "independent_diagonal, realization_random");
  cmd->add_option("--d", o.d, "Algebra dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--order", o.L, "Moment order L")->check(CLI::PositiveNumber);
  cmd->add_option("--var", o.var, "Semicircular variance");
  cmd->add_option("--b0", o.b0, "Point mass atom: comma-separated diagonal");
  cmd->add_option("--m", o.m, "Realization factor size")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Random fixture seed");
}

Distribution resolve_source(const SourceOpts& o) {
  if (!o.input.empty()) return distribution_from_json(load_json(o.input));
  if (o.fixture_name.empty())
    throw ParseError("need --input or --fixture to name a distribution");
  FixtureParams p;
  p.d = o.d;
  p.L = o.L;
  p.var = o.var;
  p.m = o.m;
  p.seed = o.seed;
  if (!o.b0.empty()) {
    const std::vector<double> diag = parse_reals(o.b0, "--b0");
    Matrix b0 = Matrix::Zero(Eigen::Index(diag.size()), Eigen::Index(diag.size()));
    for (std::size_t i = 0; i < diag.size(); ++i) b0(Eigen::Index(i), Eigen::Index(i)) = diag[i];
    p.b0 = std::move(b0);
    p.d = int(diag.size());
  }
  return fixture(o.fixture_name, p);
}

void emit(const Json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else
    save_json(j, out);
}

Matrix parse_square(const std::string& text, const char* what) {
  // Rows separated by ';', entries by ','.
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(';', pos);
    rows.push_back(parse_reals(text.substr(pos, next == std::string::npos ? next : next - pos), what));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  const Eigen::Index n = Eigen::Index(rows.size());
  Matrix Q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (Eigen::Index(rows[std::size_t(i)].size()) != n)
      throw ParseError(std::string(what) + " must be square");
    for (Eigen::Index j = 0; j < n; ++j) Q(i, j) = rows[std::size_t(i)][std::size_t(j)];
  }
  return Q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Operator-valued free probability transforms.\n"
      "Exit codes: 0 success or certified PASS, 1 certified FAIL, 2 parse error,\n"
      "3 numeric domain error, 4 precondition violation."};
  app.require_subcommand(1);
  int verdict = 0;

  // density: regularized spectral density table.
  auto* density = app.add_subcommand("density", "Emit a density CSV (columns x,density,y_reg)");
  SourceOpts density_src;
  add_source_flags(density, density_src);
  double xmin = -3.0, xmax = 3.0, yreg = 1e-2;
  int points = 121, workers = 1;
  std::string density_out;
  density->add_option("--xmin", xmin, "Grid start");
  density->add_option("--xmax", xmax, "Grid end");
  density->add_option("--points", points, "Grid size")->check(CLI::PositiveNumber);
  density->add_option("--y", yreg, "Regularization height");
  density->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  density->add_option("--output", density_out, "CSV path (stdout when absent)");
  density->callback([&] {
    const Distribution mu = resolve_source(density_src);
    std::vector<double> xs(std::size_t(points), 0.0);
    for (int i = 0; i < points; ++i)
      xs[std::size_t(i)] = points == 1 ? xmin : xmin + (xmax - xmin) * i / (points - 1);
    const std::vector<DensityRow> rows = stieltjes_density(mu, xs, yreg, workers);
    std::FILE* f = density_out.empty() ? stdout : std::fopen(density_out.c_str(), "w");
    if (!f) throw ParseError("cannot write '" + density_out + "'");
    std::fprintf(f, "x,density,y_reg\n");
    for (const DensityRow& row : rows)
      std::fprintf(f, "%.17g,%.17g,%.17g\n", row.x, row.density, yreg);
    if (!density_out.empty()) std::fclose(f);
  });

  // fixture: materialize a named fixture as JSON.
  auto* fix = app.add_subcommand("fixture", "Write a fixture distribution as JSON");
  SourceOpts fix_src;
  add_source_flags(fix, fix_src);
  std::string fix_out;
  fix->add_option("--output", fix_out, "Output path (stdout when absent)");
  fix->callback([&] { emit(to_json(resolve_source(fix_src)), fix_out); });

  // transform: evaluate G, F, or phi at a scalar point.
  auto* trans = app.add_subcommand("transform", "Evaluate a transform at a point");
  SourceOpts trans_src;
  add_source_flags(trans, trans_src);
  std::string kind = "cauchy", point_file, trans_out;
  double zre = 0.0, zim = 2.0;
  trans->add_option("--kind", kind, "cauchy, f, or voiculescu")
      ->check(CLI::IsMember({"cauchy", "f", "voiculescu"}));
  trans->add_option("--re", zre, "Point real part");
  trans->add_option("--im", zim, "Point imaginary part");
  trans->add_option("--point", point_file, "LevelMatrix JSON overriding --re/--im");
  trans->add_option("--output", trans_out, "Output path (stdout when absent)");
  trans->callback([&] {
    const Distribution mu = resolve_source(trans_src);
    const LevelMatrix b = point_file.empty()
                              ? LevelMatrix::scalar(Complex(zre, zim), mu.d)
                              : level_from_json(load_json(point_file));
    LevelMatrix value(b.d, b.n);
    if (kind == "cauchy")
      value = cauchy_eval(mu, b);
    else if (kind == "f")
      value = f_transform_eval(mu, b);
    else
      value = voiculescu_eval(mu, b);
    emit(to_json(value), trans_out);
  });

  // series: emit a transform germ as JSON, feeding the certify subcommand.
  auto* ser = app.add_subcommand("series", "Write a transform germ as JSON");
  SourceOpts ser_src;
  add_source_flags(ser, ser_src);
  std::string ser_kind = "h", ser_out;
  ser->add_option("--kind", ser_kind,
                  "h (Cauchy germ), r (cumulant series), counterexample (germ of the "
                  "half-plane map with only diagonal asymptotics; uses --order, no source)")
      ->check(CLI::IsMember({"h", "r", "counterexample"}));
  ser->add_option("--output", ser_out, "Output path (stdout when absent)");
  ser->callback([&] {
    if (ser_kind == "counterexample") {
      emit(to_json(counterexample_K_series(ser_src.L)), ser_out);
      return;
    }
    const Distribution mu = resolve_source(ser_src);
    emit(to_json(ser_kind == "h" ? h_series_from_moments(mu) : r_series(mu)), ser_out);
  });

  // certify: run a certifier on a series file.
  auto* cert = app.add_subcommand("certify", "Certify a series as a transform");
  std::string cert_which, cert_in, cert_out;
  int cert_degree = 3;
  double cert_tol = 1e-8;
  cert->add_option("which", cert_which, "cauchy or voiculescu")
      ->required()
      ->check(CLI::IsMember({"cauchy", "voiculescu"}));
  cert->add_option("--input", cert_in, "NCSeries JSON file")->required();
  cert->add_option("--degree", cert_degree, "Gram degree D")->check(CLI::PositiveNumber);
  cert->add_option("--tol", cert_tol, "Certification tolerance");
  cert->add_option("--output", cert_out, "Recovered distribution path (PASS only)");
  cert->callback([&] {
    const NCSeries s = series_from_json(load_json(cert_in));
    if (cert_which == "cauchy") {
      const CauchyCertification res = certify_cauchy(s, cert_degree, cert_tol);
      std::cout << to_json(res.report).dump(2) << "\n";
      if (res.mu && !cert_out.empty()) save_json(to_json(*res.mu), cert_out);
      verdict = res.report.pass ? 0 : 1;
    } else {
      const VoiculescuCertification res = certify_voiculescu(s, cert_degree, cert_tol);
      std::cout << to_json(res.report).dump(2) << "\n";
      if (res.mu && !cert_out.empty()) save_json(to_json(*res.mu), cert_out);
      verdict = res.report.pass ? 0 : 1;
    }
  });

  // convolve: free additive convolution of two distribution files.
  auto* conv = app.add_subcommand("convolve", "Free additive convolution");
  std::string conv_a, conv_b, conv_out;
  conv->add_option("--input", conv_a, "First distribution JSON")->required();
  conv->add_option("--with", conv_b, "Second distribution JSON")->required();
  conv->add_option("--output", conv_out, "Output path (stdout when absent)");
  conv->callback([&] {
    const Distribution sum = convolve(distribution_from_json(load_json(conv_a)),
                                      distribution_from_json(load_json(conv_b)));
    emit(to_json(sum), conv_out);
  });

  // root: k-th convolution root plus a reconstruction residual.
  auto* root = app.add_subcommand("root", "Convolution root");
  std::string root_in, root_out;
  int root_k = 2, root_degree = 3;
  root->add_option("--input", root_in, "Distribution JSON")->required();
  root->add_option("--k", root_k, "Root index k");
  root->add_option("--degree", root_degree, "Divisibility Gram degree")->check(CLI::PositiveNumber);
  root->add_option("--output", root_out, "Output path (stdout when absent)");
  root->callback([&] {
    const Distribution mu = distribution_from_json(load_json(root_in));
    const Distribution nu = convolution_root(mu, root_k, root_degree);
    Distribution acc = nu;
    for (int i = 1; i < root_k; ++i) acc = convolve(acc, nu);
    double gap = 0.0;
    for (std::size_t k = 0; k < std::min(acc.moments.size(), mu.moments.size()); ++k)
      gap = std::max(gap, op_norm(Matrix(acc.moments[k].op - mu.moments[k].op)));
    emit(Json{{"reconstruction_gap", gap}, {"distribution", to_json(nu)}}, root_out);
  });

  // semigroup: push the cumulants through a CP map.
  auto* semi = app.add_subcommand("semigroup", "Apply a CP map to the cumulants");
  std::string semi_in, semi_map, semi_out;
  double semi_t = 1.0;
  int semi_degree = 3;
  semi->add_option("--input", semi_in, "Distribution JSON")->required();
  semi->add_option("--map", semi_map, "CPMap JSON (scaled identity when absent)");
  semi->add_option("--t", semi_t, "Scale for the identity map");
  semi->add_option("--degree", semi_degree, "Divisibility Gram degree")->check(CLI::PositiveNumber);
  semi->add_option("--output", semi_out, "Output path (stdout when absent)");
  semi->callback([&] {
    const Distribution mu = distribution_from_json(load_json(semi_in));
    const CPMap rho = semi_map.empty() ? CPMap::scaled_identity(semi_t, mu.d)
                                       : cpmap_from_json(load_json(semi_map));
    emit(to_json(semigroup_apply(mu, rho, semi_degree)), semi_out);
  });

  // idcheck: divisibility verdict, optionally with extension probes.
  auto* idc = app.add_subcommand("idcheck", "Infinite divisibility report");
  SourceOpts idc_src;
  add_source_flags(idc, idc_src);
  std::string idc_floors, idc_out;
  int idc_degree = 3;
  double idc_tol = 1e-10;
  idc->add_option("--degree", idc_degree, "Gram degree D")->check(CLI::PositiveNumber);
  idc->add_option("--tol", idc_tol, "Gram tolerance");
  idc->add_option("--floors", idc_floors,
                  "Comma-separated spectrum floors for transform extension probes");
  idc->add_option("--output", idc_out, "Output path (stdout when absent)");
  idc->callback([&] {
    const Distribution mu = resolve_source(idc_src);
    const DivisibilityReport rep = is_infinitely_divisible(mu, idc_degree, idc_tol);
    Json j{{"divisibility", to_json(rep)}};
    if (!idc_floors.empty()) {
      std::vector<LevelMatrix> pts;
      for (double s : parse_reals(idc_floors, "--floors"))
        pts.push_back(LevelMatrix::scalar(Complex(0.0, s), mu.d));
      j["phi_extension"] = to_json(phi_extension_check(mu, pts));
    }
    emit(j, idc_out);
    verdict = rep.pass ? 0 : 1;
  });

  // asymptotics: the ray test that separates true transforms from the
  // counterexample germ.
  auto* asym = app.add_subcommand("asymptotics", "Ray asymptotics of the counterexample");
  std::string asym_q = "identity", asym_grid = "10,100,1000", asym_out;
  double asym_tol = 1e-2;
  asym->add_option("--q", asym_q, "identity, diag, skew, or rows 'a,b;c,d'");
  asym->add_option("--grid", asym_grid, "Comma-separated ray heights");
  asym->add_option("--tol", asym_tol, "Residual tolerance");
  asym->add_option("--output", asym_out, "Output path (stdout when absent)");
  asym->callback([&] {
    Matrix Q;
    if (asym_q == "identity")
      Q = Matrix::Identity(2, 2);
    else if (asym_q == "diag") {
      Q = Matrix::Zero(2, 2);
      Q(0, 0) = 1.0;
      Q(1, 1) = 2.0;
    } else if (asym_q == "skew") {
      Q = Matrix(2, 2);
      Q << Complex(2.0), Complex(1.0), Complex(1.0), Complex(1.0);
    } else {
      Q = parse_square(asym_q, "--q");
    }
    if (Q.rows() != 2) throw ParseError("the counterexample lives on d = 2");
    const AsymptoticsReport rep = asymptotics_check(
        [](const LevelMatrix& b) { return counterexample_H(b); }, Q,
        parse_reals(asym_grid, "--grid"), asym_tol);
    emit(to_json(rep), asym_out);
    verdict = rep.pass ? 0 : 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Parse:
        return 2;
      case ErrorKind::NumericDomain:
        return 3;
      case ErrorKind::Precondition:
        return 4;
    }
    return 4;
  }
  return verdict;
}
