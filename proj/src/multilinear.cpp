#include "freeprob/multilinear.hpp"

#include <random>

namespace freeprob {

namespace {

Vector kron_vecs(const std::vector<Vector>& vs) {
  Vector acc = Vector::Ones(1);
  for (const auto& v : vs) {
    Vector next(acc.size() * v.size());
    for (Eigen::Index i = 0; i < acc.size(); ++i)
      next.segment(i * v.size(), v.size()) = acc(i) * v;
    acc = std::move(next);
  }
  return acc;
}

Matrix random_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

Matrix MultilinearMap::apply(const std::vector<Matrix>& args) const {
  if (static_cast<int>(args.size()) != ell) throw DimensionMismatch("apply arity");
  if (ell == 0) return constant_value();
  std::vector<Vector> vs;
  vs.reserve(args.size());
  for (const auto& a : args) {
    if (a.rows() != d || a.cols() != d) throw DimensionMismatch("apply argument size");
    vs.push_back(vec(a));
  }
  return unvec(op * kron_vecs(vs), d);
}

Matrix contract_first(const Matrix& A, const Vector& v, int d2) {
  const Eigen::Index W = A.cols() / d2;
  Matrix out = Matrix::Zero(A.rows(), W);
  for (int s = 0; s < d2; ++s)
    if (v(s) != 0.0) out.noalias() += v(s) * A.middleCols(s * W, W);
  return out;
}

LevelMatrix apply_level(const MultilinearMap& T, const LevelMatrix& b) {
  if (T.d != b.d) throw DimensionMismatch("apply_level base dimension");
  const int n = b.n, d = b.d, d2 = d * d;
  if (T.ell == 0) return amplify(T.constant_value(), n);

  std::vector<Vector> vb(n * n);
  std::vector<char> nz(n * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      vb[i * n + j] = vec(Matrix(b.block(i, j)));
      nz[i * n + j] = vb[i * n + j].cwiseAbs().maxCoeff() > 0.0;
    }

  LevelMatrix R(d, n);
  std::vector<Matrix> cur(n), nxt(n);
  std::vector<char> act(n), nact(n);
  for (int i = 0; i < n; ++i) {
    std::fill(act.begin(), act.end(), 0);
    for (int k = 0; k < n; ++k)
      if (nz[i * n + k]) {
        cur[k] = contract_first(T.op, vb[i * n + k], d2);
        act[k] = 1;
      }
    for (int p = 2; p <= T.ell; ++p) {
      std::fill(nact.begin(), nact.end(), 0);
      for (int k = 0; k < n; ++k) {
        if (!act[k]) continue;
        for (int k2 = 0; k2 < n; ++k2) {
          if (!nz[k * n + k2]) continue;
          Matrix piece = contract_first(cur[k], vb[k * n + k2], d2);
          if (!nact[k2]) {
            nxt[k2] = std::move(piece);
            nact[k2] = 1;
          } else {
            nxt[k2] += piece;
          }
        }
      }
      cur.swap(nxt);
      act.swap(nact);
    }
    for (int j = 0; j < n; ++j)
      if (act[j]) R.block(i, j) = unvec(cur[j].col(0), d);
  }
  return R;
}

LevelMatrix apply_level_deriv(const MultilinearMap& T, const LevelMatrix& b,
                              const LevelMatrix& E) {
  if (T.d != b.d || T.d != E.d || b.n != E.n)
    throw DimensionMismatch("apply_level_deriv shapes");
  const int n = b.n, d = b.d, d2 = d * d;
  LevelMatrix R(d, n);
  if (T.ell == 0) return R;

  std::vector<Vector> vb(n * n), ve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      vb[i * n + j] = vec(Matrix(b.block(i, j)));
      ve[i * n + j] = vec(Matrix(E.block(i, j)));
    }

  // Two-state path contraction: state 1 has consumed the E slot already.
  std::vector<Matrix> cur0(n), cur1(n), nxt0(n), nxt1(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      cur0[k] = contract_first(T.op, vb[i * n + k], d2);
      cur1[k] = contract_first(T.op, ve[i * n + k], d2);
    }
    for (int p = 2; p <= T.ell; ++p) {
      for (int k2 = 0; k2 < n; ++k2) {
        nxt0[k2] = Matrix::Zero(d2, cur0[0].cols() / d2);
        nxt1[k2] = nxt0[k2];
      }
      for (int k = 0; k < n; ++k)
        for (int k2 = 0; k2 < n; ++k2) {
          nxt0[k2].noalias() += contract_first(cur0[k], vb[k * n + k2], d2);
          nxt1[k2].noalias() += contract_first(cur1[k], vb[k * n + k2], d2);
          nxt1[k2].noalias() += contract_first(cur0[k], ve[k * n + k2], d2);
        }
      cur0.swap(nxt0);
      cur1.swap(nxt1);
    }
    for (int j = 0; j < n; ++j) R.block(i, j) = unvec(cur1[j].col(0), d);
  }
  return R;
}

Matrix apply_sparse(const MultilinearMap& T,
                    const std::vector<std::vector<std::pair<int, Complex>>>& slots) {
  if (static_cast<int>(slots.size()) != T.ell) throw DimensionMismatch("apply_sparse arity");
  if (T.ell == 0) return T.constant_value();
  Matrix out = Matrix::Zero(T.d, T.d);
  for (const auto& s : slots)
    if (s.empty()) return out;
  const int d2 = T.d * T.d;
  std::vector<size_t> pick(slots.size(), 0);
  while (true) {
    Complex coeff = 1.0;
    Eigen::Index idx = 0;
    for (size_t p = 0; p < slots.size(); ++p) {
      const auto& [alpha, c] = slots[p][pick[p]];
      coeff *= c;
      idx = idx * d2 + alpha;
    }
    if (coeff != 0.0) out += coeff * unvec(T.op.col(idx), T.d);
    int p = static_cast<int>(slots.size()) - 1;
    while (p >= 0 && ++pick[p] == slots[p].size()) pick[p--] = 0;
    if (p < 0) break;
  }
  return out;
}

MultilinearMap concat_product(const MultilinearMap& T, const MultilinearMap& U) {
  if (T.d != U.d) throw DimensionMismatch("concat_product base dimension");
  const int d = T.d;
  MultilinearMap P(d, T.ell + U.ell);
  const Eigen::Index ct = T.op.cols(), cu = U.op.cols();
  std::vector<Matrix> tu(ct), uu(cu);
  for (Eigen::Index s = 0; s < ct; ++s) tu[s] = unvec(T.op.col(s), d);
  for (Eigen::Index s = 0; s < cu; ++s) uu[s] = unvec(U.op.col(s), d);
  for (Eigen::Index s = 0; s < ct; ++s)
    for (Eigen::Index t = 0; t < cu; ++t)
      P.op.col(s * cu + t) = vec(Matrix(tu[s] * uu[t]));
  return P;
}

MultilinearMap sandwich(const MultilinearMap& m) {
  const int d = m.d, d2 = d * d;
  MultilinearMap T(d, m.ell + 2);
  const Eigen::Index cm = m.op.cols();
  for (int a = 0; a < d2; ++a) {
    const Matrix ea = matrix_unit(a, d);
    for (Eigen::Index s = 0; s < cm; ++s) {
      const Matrix mid = ea * unvec(m.op.col(s), d);
      for (int b = 0; b < d2; ++b)
        T.op.col((Eigen::Index(a) * cm + s) * d2 + b) = vec(Matrix(mid * matrix_unit(b, d)));
    }
  }
  return T;
}

MultilinearMap sandwich_left(const MultilinearMap& m) {
  const int d = m.d, d2 = d * d;
  MultilinearMap T(d, m.ell + 1);
  const Eigen::Index cm = m.op.cols();
  for (int a = 0; a < d2; ++a) {
    const Matrix ea = matrix_unit(a, d);
    for (Eigen::Index s = 0; s < cm; ++s)
      T.op.col(Eigen::Index(a) * cm + s) = vec(Matrix(ea * unvec(m.op.col(s), d)));
  }
  return T;
}

namespace {

double factor_residual(const MultilinearMap& T, const MultilinearMap& S, bool left) {
  // Sampled check of T(x_1..x_ell) == x_1 * S(x_2..) (left) or S(..) * x_ell,
  // relative to the argument scales and the size of the map itself.
  std::mt19937_64 rng(12345);
  const double map_scale = 1.0 + T.op.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<Matrix> args;
    double scale = 1.0;
    for (int p = 0; p < T.ell; ++p) {
      args.push_back(random_matrix(T.d, rng));
      scale *= std::max(1.0, op_norm(args.back()));
    }
    std::vector<Matrix> inner(args.begin() + (left ? 1 : 0), args.end() - (left ? 0 : 1));
    const Matrix lhs = T.apply(args);
    const Matrix rhs = left ? Matrix(args.front() * S.apply(inner)) : Matrix(S.apply(inner) * args.back());
    worst = std::max(worst, op_norm(Matrix(lhs - rhs)) / (scale * map_scale));
  }
  return worst;
}

}  // namespace

MultilinearMap strip_left(const MultilinearMap& T, double* residual) {
  if (T.ell < 1) throw DimensionMismatch("strip_left needs arity >= 1");
  MultilinearMap S(T.d, T.ell - 1, contract_first(T.op, vec(Matrix(Matrix::Identity(T.d, T.d))), T.d * T.d));
  if (residual) *residual = factor_residual(T, S, /*left=*/true);
  return S;
}

MultilinearMap strip_right(const MultilinearMap& T, double* residual) {
  if (T.ell < 1) throw DimensionMismatch("strip_right needs arity >= 1");
  const int d2 = T.d * T.d;
  const Eigen::Index W = T.op.cols() / d2;
  const Vector vI = vec(Matrix(Matrix::Identity(T.d, T.d)));
  MultilinearMap S(T.d, T.ell - 1);
  for (Eigen::Index w = 0; w < W; ++w) {
    Vector acc = Vector::Zero(T.d * T.d);
    for (int s = 0; s < d2; ++s)
      if (vI(s) != 0.0) acc += vI(s) * T.op.col(w * d2 + s);
    S.op.col(w) = acc;
  }
  if (residual) *residual = factor_residual(T, S, /*left=*/false);
  return S;
}

MultilinearMap compose_slots(const MultilinearMap& S,
                             const std::vector<const MultilinearMap*>& parts) {
  if (static_cast<int>(parts.size()) != S.ell) throw DimensionMismatch("compose_slots arity");
  const int d = S.d, d2 = d * d;
  int total = 0;
  for (const auto* p : parts) {
    if (p->d != d) throw DimensionMismatch("compose_slots base dimension");
    total += p->ell;
  }
  Matrix A = S.op;
  Eigen::Index Dt = 1;
  int rem = S.ell;
  for (const auto* part : parts) {
    const Eigen::Index Du = part->op.cols();
    const Eigen::Index Ds = MultilinearMap::cols(d, rem - 1);
    Matrix B = Matrix::Zero(d2, Dt * Du * Ds);
    for (Eigen::Index tp = 0; tp < Dt; ++tp)
      for (int s = 0; s < d2; ++s) {
        const auto Ablk = A.middleCols((tp * d2 + s) * Ds, Ds);
        for (Eigen::Index u = 0; u < Du; ++u) {
          const Complex c = part->op(s, u);
          if (c != 0.0) B.middleCols((tp * Du + u) * Ds, Ds).noalias() += c * Ablk;
        }
      }
    A = std::move(B);
    Dt *= Du;
    rem -= 1;
  }
  return {d, total, std::move(A)};
}

MultilinearMap out_transform(const Matrix& A, const MultilinearMap& T) {
  return {T.d, T.ell, A * T.op};
}

MultilinearMap rev_adjoint(const MultilinearMap& T) {
  const int d = T.d, d2 = d * d;
  // basis index adjoint: (row, col) -> (col, row)
  std::vector<int> adj(d2);
  for (int a = 0; a < d2; ++a) adj[a] = (a % d) * d + a / d;
  MultilinearMap R(d, T.ell);
  std::vector<int> tuple(T.ell, 0);
  const Eigen::Index total = T.op.cols();
  for (Eigen::Index s = 0; s < total; ++s) {
    Eigen::Index rest = s;
    for (int p = T.ell - 1; p >= 0; --p) {
      tuple[p] = static_cast<int>(rest % d2);
      rest /= d2;
    }
    Eigen::Index src = 0;
    for (int p = T.ell - 1; p >= 0; --p) src = src * d2 + adj[tuple[p]];
    R.op.col(s) = vec(Matrix(unvec(T.op.col(src), d).adjoint()));
  }
  return R;
}

Eigen::Index tuple_index(const std::vector<int>& tuple, int d) {
  Eigen::Index idx = 0;
  for (int t : tuple) idx = idx * (Eigen::Index(d) * d) + t;
  return idx;
}

}  // namespace freeprob
