#include "freeprob/json_io.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include "freeprob/errors.hpp"

namespace freeprob {

namespace {

Json pack_rows(const Matrix& m, bool imag) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

Json pack_flat(const Matrix& m, bool imag) {
  Json flat = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      flat.push_back(imag ? m(i, j).imag() : m(i, j).real());
  return flat;
}

double number_at(const Json& j) {
  if (!j.is_number()) throw ParseError("expected a number in a matrix entry");
  return j.get<double>();
}

Matrix unpack_rows(const Json& re, const Json& im, Eigen::Index rows, Eigen::Index cols) {
  if (!re.is_array() || !im.is_array() || Eigen::Index(re.size()) != rows ||
      Eigen::Index(im.size()) != rows)
    throw ParseError("matrix rows do not match the declared shape");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& rr = re[std::size_t(i)];
    const Json& ri = im[std::size_t(i)];
    if (!rr.is_array() || !ri.is_array() || Eigen::Index(rr.size()) != cols ||
        Eigen::Index(ri.size()) != cols)
      throw ParseError("matrix columns do not match the declared shape");
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = Complex(number_at(rr[std::size_t(j)]), number_at(ri[std::size_t(j)]));
  }
  return m;
}

Matrix unpack_flat(const Json& re, const Json& im, Eigen::Index rows, Eigen::Index cols) {
  const Eigen::Index need = rows * cols;
  if (!re.is_array() || !im.is_array() || Eigen::Index(re.size()) != need ||
      Eigen::Index(im.size()) != need)
    throw ParseError("flat matrix array does not match the declared shape");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const std::size_t k = std::size_t(i * cols + j);
      m(i, j) = Complex(number_at(re[k]), number_at(im[k]));
    }
  return m;
}

int int_field(const Json& j, const char* key, int lo) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ParseError(std::string("missing integer field '") + key + "'");
  const int v = j[key].get<int>();
  if (v < lo) throw ParseError(std::string("field '") + key + "' out of range");
  return v;
}

double real_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(std::string("missing numeric field '") + key + "'");
  return j[key].get<double>();
}

const Json& array_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    throw ParseError(std::string("missing array field '") + key + "'");
  return j[key];
}

std::vector<MultilinearMap> maps_from_json(const Json& arr, int d, int count,
                                           const char* what) {
  if (Eigen::Index(arr.size()) != count)
    throw ParseError(std::string(what) + " list does not match the declared order");
  std::vector<MultilinearMap> maps;
  maps.reserve(std::size_t(count));
  for (int k = 0; k < count; ++k) {
    MultilinearMap m = map_from_json(arr[std::size_t(k)], d);
    if (m.ell != k) throw ParseError(std::string(what) + " arities must ascend from zero");
    maps.push_back(std::move(m));
  }
  return maps;
}

Json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Json to_json(const LevelMatrix& b) {
  return Json{{"d", b.d},
              {"n", b.n},
              {"re", pack_rows(b.mat, false)},
              {"im", pack_rows(b.mat, true)}};
}

LevelMatrix level_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("level matrix must be an object");
  const int d = int_field(j, "d", 1);
  const int n = int_field(j, "n", 1);
  LevelMatrix b(d, n);
  const Eigen::Index nd = Eigen::Index(d) * n;
  b.mat = unpack_rows(array_field(j, "re"), array_field(j, "im"), nd, nd);
  return b;
}

Json to_json(const MultilinearMap& T) {
  return Json{{"ell", T.ell}, {"re", pack_flat(T.op, false)}, {"im", pack_flat(T.op, true)}};
}

MultilinearMap map_from_json(const Json& j, int d) {
  if (!j.is_object()) throw ParseError("coefficient must be an object");
  const int ell = int_field(j, "ell", 0);
  MultilinearMap T(d, ell);
  T.op = unpack_flat(array_field(j, "re"), array_field(j, "im"), Eigen::Index(d) * d,
                     MultilinearMap::cols(d, ell));
  return T;
}

Json to_json(const NCSeries& s) {
  Json coeffs = Json::array();
  for (const MultilinearMap& c : s.coeffs) coeffs.push_back(to_json(c));
  Json j{{"d", s.d}, {"L", s.L}, {"coeffs", std::move(coeffs)}};
  if (s.tail_bound) j["tail_bound"] = *s.tail_bound;
  return j;
}

NCSeries series_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("series must be an object");
  const int d = int_field(j, "d", 1);
  const int L = int_field(j, "L", 0);
  NCSeries s(d, L);
  const Json& arr = array_field(j, "coeffs");
  std::vector<bool> seen(std::size_t(L) + 1, false);
  for (const Json& cj : arr) {
    MultilinearMap c = map_from_json(cj, d);
    if (c.ell > L) throw ParseError("coefficient arity exceeds the series order");
    if (seen[std::size_t(c.ell)]) throw ParseError("duplicate coefficient arity");
    seen[std::size_t(c.ell)] = true;
    s.coeffs[std::size_t(c.ell)] = std::move(c);
  }
  if (j.contains("tail_bound")) s.tail_bound = real_field(j, "tail_bound");
  return s;
}

Json to_json(const Distribution& mu) {
  Json moments = Json::array();
  for (const MultilinearMap& m : mu.moments) moments.push_back(to_json(m));
  Json cumulants = Json::array();
  for (const MultilinearMap& c : mu.cumulants) cumulants.push_back(to_json(c));
  Json j{{"d", mu.d},
         {"L", mu.L},
         {"M", mu.M},
         {"moments", std::move(moments)},
         {"cumulants", std::move(cumulants)}};
  if (mu.realization) {
    j["realization"] = Json{{"m", mu.realization->m},
                            {"a_re", pack_flat(mu.realization->a, false)},
                            {"a_im", pack_flat(mu.realization->a, true)}};
  }
  return j;
}

Distribution distribution_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("distribution must be an object");
  const int d = int_field(j, "d", 1);
  const int L = int_field(j, "L", 0);
  const double M = real_field(j, "M");

  std::vector<MultilinearMap> moments, cumulants;
  if (j.contains("moments")) moments = maps_from_json(j["moments"], d, L, "moment");
  if (j.contains("cumulants")) cumulants = maps_from_json(j["cumulants"], d, L, "cumulant");
  if (moments.empty() && cumulants.empty() && !j.contains("realization"))
    throw ParseError("distribution needs moments, cumulants, or a realization");

  Distribution mu;
  if (j.contains("realization")) {
    const Json& rj = j["realization"];
    if (!rj.is_object()) throw ParseError("realization must be an object");
    const int m = int_field(rj, "m", 1);
    const Eigen::Index dm = Eigen::Index(d) * m;
    Matrix a = unpack_flat(array_field(rj, "a_re"), array_field(rj, "a_im"), dm, dm);
    mu = distribution_from_realization({d, m, std::move(a)}, L);
    if (!moments.empty()) mu.moments = std::move(moments);
    if (!cumulants.empty()) mu.cumulants = std::move(cumulants);
  } else if (!moments.empty()) {
    mu = distribution_from_moments(d, L, std::move(moments));
    if (!cumulants.empty()) mu.cumulants = std::move(cumulants);
  } else {
    mu = distribution_from_cumulants(d, L, std::move(cumulants));
  }
  mu.M = M;
  return mu;
}

Json to_json(const CPMap& rho) {
  return Json{{"d", rho.d}, {"op_re", pack_flat(rho.op, false)}, {"op_im", pack_flat(rho.op, true)}};
}

CPMap cpmap_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("map must be an object");
  const int d = int_field(j, "d", 1);
  CPMap rho;
  rho.d = d;
  const Eigen::Index d2 = Eigen::Index(d) * d;
  rho.op = unpack_flat(array_field(j, "op_re"), array_field(j, "op_im"), d2, d2);
  return rho;
}

Json to_json(const CauchyReport& rep) {
  return Json{{"identity_ok", rep.identity_ok},
              {"identity_residual", rep.identity_residual},
              {"bimodular_residual", rep.bimodular_residual},
              {"bound_M", rep.bound_M},
              {"gram_min_eig", rep.gram_min_eig},
              {"pass", rep.pass}};
}

Json to_json(const AsymptoticsReport& rep) {
  Json rows = Json::array();
  for (const AsymptoticsRow& row : rep.rows)
    rows.push_back(Json{{"y", row.y}, {"residual", row.residual}});
  return Json{{"rows", std::move(rows)}, {"pass", rep.pass}};
}

Json to_json(const Sigma0Report& rep) {
  return Json{{"identity_residual", rep.identity_residual},
              {"bound_M", rep.bound_M},
              {"gram_min_eig", rep.gram_min_eig},
              {"pass", rep.pass}};
}

Json to_json(const VoiculescuReport& rep) {
  return Json{{"sigma0", to_json(rep.sigma0)},
              {"div_gram_min_eig", rep.div_gram_min_eig},
              {"phi_residual", rep.phi_residual},
              {"pass", rep.pass}};
}

Json to_json(const DivisibilityReport& rep) {
  return Json{{"gram_min_eig", rep.gram_min_eig}, {"pass", rep.pass}};
}

Json to_json(const PhiExtensionReport& rep) {
  Json rows = Json::array();
  for (const PhiExtensionRow& row : rep.rows)
    rows.push_back(Json{{"spectrum_floor", row.spectrum_floor},
                        {"certified", row.certified},
                        {"tail", finite_or_null(row.tail)},
                        {"phi_margin", row.phi_margin}});
  return Json{{"rows", std::move(rows)},
              {"certified_count", rep.certified_count},
              {"all_certified", rep.all_certified}};
}

Json to_json(const KantorovichCertificate& cert) {
  return Json{{"eta", cert.eta},
              {"K", cert.K},
              {"h", cert.h},
              {"t_star", cert.t_star},
              {"t_star_star", finite_or_null(cert.t_star_star)},
              {"converged", cert.converged},
              {"iterations", cert.iterations}};
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON in '") + path + "': " + e.what());
  }
}

void save_json(const Json& j, const std::string& path, int indent) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << j.dump(indent) << '\n';
  if (!out) throw ParseError("failed while writing '" + path + "'");
}

}  // namespace freeprob
