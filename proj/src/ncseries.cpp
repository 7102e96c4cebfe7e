#include "freeprob/ncseries.hpp"

namespace freeprob {

namespace {

constexpr double kZeroTol = 1e-10;

void check_same(const NCSeries& a, const NCSeries& b) {
  if (a.d != b.d) throw DimensionMismatch("series base dimension");
}

// All compositions of ell into parts >= 1, each visited once.
void for_each_composition(int ell, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> parts;
  std::function<void(int)> rec = [&](int rem) {
    if (rem == 0) {
      fn(parts);
      return;
    }
    for (int p = 1; p <= rem; ++p) {
      parts.push_back(p);
      rec(rem - p);
      parts.pop_back();
    }
  };
  rec(ell);
}

NCSeries one_series(int d, int L) {
  NCSeries s(d, L);
  s.coeffs[0] = MultilinearMap::constant(Matrix::Identity(d, d));
  return s;
}

bool is_zero_map(const MultilinearMap& m) {
  return m.op.size() == 0 || m.op.cwiseAbs().maxCoeff() <= kZeroTol;
}

bool is_identity_map(const MultilinearMap& m) {
  if (m.ell != 1) return false;
  return (m.op - Matrix::Identity(m.op.rows(), m.op.cols())).cwiseAbs().maxCoeff() <= kZeroTol;
}

// Regular part of s(w)^{-1} = w^{-1} + r(w) for s = w + higher with
// coefficients factoring through their first slot.
NCSeries cauchy_shape_inverse(const NCSeries& s) {
  const int d = s.d;
  if (s.L < 2) throw SingularLeadingTerm("Cauchy-shape inverse needs order >= 2");
  NCSeries u(d, s.L - 1);
  for (int ell = 2; ell <= s.L; ++ell) {
    double resid = 0.0;
    u.coeffs[ell - 1] = strip_left(s.coeffs[ell], &resid);
    if (resid > 1e-8)
      throw SingularLeadingTerm("coefficient does not factor through its first slot");
  }
  NCSeries q = mult_inverse(add(one_series(d, u.L), u));
  NCSeries r(d, q.L - 1);
  for (int ell = 1; ell <= q.L; ++ell) {
    double resid = 0.0;
    r.coeffs[ell - 1] = strip_right(q.coeffs[ell], &resid);
    if (resid > 1e-8)
      throw SingularLeadingTerm("inverse coefficient does not factor through its last slot");
  }
  return r;
}

}  // namespace

NCOracle series_oracle(NCSeries s) {
  NCOracle o;
  o.kind = OracleKind::TruncatedSeries;
  o.eval = [s = std::move(s)](const LevelMatrix& b) { return eval(s, b); };
  return o;
}

LevelMatrix eval(const NCSeries& s, const LevelMatrix& b) {
  if (s.d != b.d) throw DimensionMismatch("eval base dimension");
  LevelMatrix acc(b.d, b.n);
  for (const auto& c : s.coeffs) acc = acc + apply_level(c, b);
  return acc;
}

NCSeries add(const NCSeries& a, const NCSeries& b) {
  check_same(a, b);
  const int L = std::min(a.L, b.L);
  NCSeries r(a.d, L);
  for (int ell = 0; ell <= L; ++ell)
    r.coeffs[ell] = {a.d, ell, a.coeffs[ell].op + b.coeffs[ell].op};
  return r;
}

NCSeries scale(Complex z, const NCSeries& s) {
  NCSeries r = s;
  for (auto& c : r.coeffs) c.op *= z;
  return r;
}

NCSeries truncate(const NCSeries& s, int L) {
  if (L >= s.L) return s;
  NCSeries r(s.d, L);
  for (int ell = 0; ell <= L; ++ell) r.coeffs[ell] = s.coeffs[ell];
  r.tail_bound = s.tail_bound;
  return r;
}

NCSeries multiply(const NCSeries& a, const NCSeries& b) {
  check_same(a, b);
  const int L = std::min(a.L, b.L);
  NCSeries r(a.d, L);
  for (int ell = 0; ell <= L; ++ell)
    for (int j = 0; j <= ell; ++j) {
      if (j > a.L || ell - j > b.L) continue;
      if (is_zero_map(a.coeffs[j]) || is_zero_map(b.coeffs[ell - j])) continue;
      r.coeffs[ell].op += concat_product(a.coeffs[j], b.coeffs[ell - j]).op;
    }
  return r;
}

NCSeries mult_inverse(const NCSeries& s) {
  const int d = s.d;
  const Matrix T0 = s.coeffs[0].constant_value();
  if (op_norm(T0) <= kZeroTol) {
    if (s.L >= 1 && is_identity_map(s.coeffs[1])) return cauchy_shape_inverse(s);
    throw SingularLeadingTerm("zero constant term and leading coefficient not the identity");
  }
  Eigen::FullPivLU<Matrix> lu(T0);
  if (!lu.isInvertible()) throw SingularLeadingTerm("constant term not invertible");
  const Matrix T0inv = lu.inverse();
  // s = T0 (1 - u): Neumann series for (1 - u)^{-1}, then right-factor T0^{-1}.
  NCSeries u(d, s.L);
  const Matrix lm = lmult_op(T0inv);
  for (int ell = 1; ell <= s.L; ++ell) u.coeffs[ell] = {d, ell, -(lm * s.coeffs[ell].op)};
  NCSeries acc = one_series(d, s.L);
  NCSeries pw = u;
  for (int m = 1; m <= s.L; ++m) {
    acc = add(acc, pw);
    if (m < s.L) pw = multiply(pw, u);
  }
  const Matrix rm = rmult_op(T0inv);
  for (auto& c : acc.coeffs) c = out_transform(rm, c);
  return acc;
}

NCSeries compose(const NCSeries& s, const NCSeries& t) {
  check_same(s, t);
  if (!is_zero_map(t.coeffs[0]))
    throw NotNormalized("compose needs zero constant term in the inner series");
  const int L = std::min(s.L, t.L);
  NCSeries r(s.d, L);
  r.coeffs[0] = s.coeffs[0];
  for (int ell = 1; ell <= L; ++ell) {
    Matrix acc = Matrix::Zero(r.coeffs[ell].op.rows(), r.coeffs[ell].op.cols());
    for_each_composition(ell, [&](const std::vector<int>& parts) {
      const int m = static_cast<int>(parts.size());
      if (m > s.L || is_zero_map(s.coeffs[m])) return;
      std::vector<const MultilinearMap*> ptrs;
      ptrs.reserve(m);
      for (int p : parts) {
        if (is_zero_map(t.coeffs[p])) return;
        ptrs.push_back(&t.coeffs[p]);
      }
      acc += compose_slots(s.coeffs[m], ptrs).op;
    });
    r.coeffs[ell].op = acc;
  }
  return r;
}

NCSeries comp_inverse(const NCSeries& s) {
  if (!is_zero_map(s.coeffs[0]) || s.L < 1 || !is_identity_map(s.coeffs[1]))
    throw NotNormalized("comp_inverse needs s = w + higher order terms");
  const int d = s.d;
  NCSeries t(d, s.L);
  t.coeffs[1] = MultilinearMap::identity(d);
  for (int ell = 2; ell <= s.L; ++ell) {
    Matrix acc = Matrix::Zero(d * d, MultilinearMap::cols(d, ell));
    for_each_composition(ell, [&](const std::vector<int>& parts) {
      const int m = static_cast<int>(parts.size());
      if (m < 2 || m > s.L || is_zero_map(s.coeffs[m])) return;
      std::vector<const MultilinearMap*> ptrs;
      ptrs.reserve(m);
      for (int p : parts) {
        if (is_zero_map(t.coeffs[p])) return;
        ptrs.push_back(&t.coeffs[p]);
      }
      acc += compose_slots(s.coeffs[m], ptrs).op;
    });
    t.coeffs[ell].op = -acc;
  }
  return t;
}

NCSeries extract_coefficients(const NCOracle& f, int d, int L, double delta) {
  const bool regularize = f.kind == OracleKind::RequiresInvertible;
  const int d2 = d * d;
  NCSeries out(d, L);
  auto corner = [&](const LevelMatrix& N, int ell) -> Matrix {
    if (!regularize) return f.eval(N).block(0, ell);
    LevelMatrix Na = N, Nb = N;
    Na.mat += delta * Matrix::Identity(N.dim(), N.dim());
    Nb.mat += (delta / 2.0) * Matrix::Identity(N.dim(), N.dim());
    return 2.0 * f.eval(Nb).block(0, ell) - Matrix(f.eval(Na).block(0, ell));
  };
  out.coeffs[0] = MultilinearMap::constant(corner(LevelMatrix(d, 1), 0));
  std::vector<int> tuple;
  for (int ell = 1; ell <= L; ++ell) {
    tuple.assign(ell, 0);
    MultilinearMap T(d, ell);
    while (true) {
      LevelMatrix N(d, ell + 1);
      for (int p = 0; p < ell; ++p) N.block(p, p + 1) = matrix_unit(tuple[p], d);
      T.op.col(tuple_index(tuple, d)) = vec(corner(N, ell));
      int p = ell - 1;
      while (p >= 0 && ++tuple[p] == d2) tuple[p--] = 0;
      if (p < 0) break;
    }
    out.coeffs[ell] = std::move(T);
  }
  return out;
}

Matrix delta_R_eval(const std::function<LevelMatrix(const LevelMatrix&)>& f,
                    const LevelMatrix& X, const LevelMatrix& Y, const Matrix& Z) {
  if (X.d != Y.d) throw DimensionMismatch("delta_R_eval base dimension");
  if (Z.rows() != X.dim() || Z.cols() != Y.dim())
    throw DimensionMismatch("delta_R_eval direction shape");
  const int d = X.d, n = X.n + Y.n;
  LevelMatrix W(d, n);
  W.mat.topLeftCorner(X.dim(), X.dim()) = X.mat;
  W.mat.bottomRightCorner(Y.dim(), Y.dim()) = Y.mat;
  W.mat.topRightCorner(X.dim(), Y.dim()) = Z;
  return f(W).mat.topRightCorner(X.dim(), Y.dim());
}

}  // namespace freeprob
