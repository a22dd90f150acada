#include "classprod/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

namespace classprod {

// ---------- matrix helpers ----------

Matrix mat_identity(int dim) {
  Matrix m;
  m.dim = dim;
  for (int i = 0; i < dim; ++i) m.set(i, i, 1);  // the unit element has index 1
  return m;
}

Matrix mat_mul(const FieldCtx& F, const Matrix& A, const Matrix& B) {
  Matrix C;
  C.dim = A.dim;
  const int d = A.dim;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      int64_t s = 0;
      for (int k = 0; k < d; ++k) s = F.add(s, F.mul(A.at(i, k), B.at(k, j)));
      C.set(i, j, int32_t(s));
    }
  return C;
}

int64_t mat_det(const FieldCtx& F, const Matrix& A) {
  if (A.dim == 2) return F.sub(F.mul(A.at(0, 0), A.at(1, 1)), F.mul(A.at(0, 1), A.at(1, 0)));
  auto m2 = [&](int r1, int c1, int r2, int c2) {
    return F.sub(F.mul(A.at(r1, c1), A.at(r2, c2)), F.mul(A.at(r1, c2), A.at(r2, c1)));
  };
  int64_t s = F.mul(A.at(0, 0), m2(1, 1, 2, 2));
  s = F.sub(s, F.mul(A.at(0, 1), m2(1, 0, 2, 2)));
  s = F.add(s, F.mul(A.at(0, 2), m2(1, 0, 2, 1)));
  return s;
}

Matrix mat_inverse(const FieldCtx& F, const Matrix& A) {
  int64_t det = mat_det(F, A);
  int64_t di = F.inv(det);
  Matrix B;
  B.dim = A.dim;
  if (A.dim == 2) {
    B.set(0, 0, int32_t(F.mul(di, A.at(1, 1))));
    B.set(0, 1, int32_t(F.mul(di, F.neg(A.at(0, 1)))));
    B.set(1, 0, int32_t(F.mul(di, F.neg(A.at(1, 0)))));
    B.set(1, 1, int32_t(F.mul(di, A.at(0, 0))));
    return B;
  }
  auto m2 = [&](int r1, int c1, int r2, int c2) {
    return F.sub(F.mul(A.at(r1, c1), A.at(r2, c2)), F.mul(A.at(r1, c2), A.at(r2, c1)));
  };
  // adjugate transpose: B[j][i] = (-1)^{i+j} * minor(i, j)
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int r1 = (i + 1) % 3, r2 = (i + 2) % 3;
      int c1 = (j + 1) % 3, c2 = (j + 2) % 3;
      if (r1 > r2) std::swap(r1, r2);
      if (c1 > c2) std::swap(c1, c2);
      int64_t minor = m2(r1, c1, r2, c2);
      if ((i + j) % 2) minor = F.neg(minor);
      B.set(j, i, int32_t(F.mul(di, minor)));
    }
  return B;
}

Matrix mat_star(const FieldCtx& F, const Matrix& A, int64_t conj_pow) {
  Matrix B;
  B.dim = A.dim;
  for (int i = 0; i < A.dim; ++i)
    for (int j = 0; j < A.dim; ++j) B.set(j, i, int32_t(F.frobenius(A.at(i, j), conj_pow)));
  return B;
}

namespace {

Matrix mat_sub_lambda(const FieldCtx& F, const Matrix& A, int64_t lam) {
  Matrix B = A;
  for (int i = 0; i < A.dim; ++i) B.set(i, i, int32_t(F.sub(A.at(i, i), lam)));
  return B;
}

int mat_rank(const FieldCtx& F, Matrix M) {
  const int d = M.dim;
  int rank = 0;
  for (int col = 0; col < d && rank < d; ++col) {
    int pivot = -1;
    for (int r = rank; r < d; ++r)
      if (M.at(r, col) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    for (int c = 0; c < d; ++c) {
      int32_t t = M.at(rank, c);
      M.set(rank, c, M.at(pivot, c));
      M.set(pivot, c, t);
    }
    int64_t pi = F.inv(M.at(rank, col));
    for (int r = rank + 1; r < d; ++r) {
      int64_t f = F.mul(M.at(r, col), pi);
      if (f == 0) continue;
      for (int c = 0; c < d; ++c)
        M.set(r, c, int32_t(F.sub(M.at(r, c), F.mul(f, M.at(rank, c)))));
    }
    ++rank;
  }
  return rank;
}

Matrix mat_scale(const FieldCtx& F, int64_t c, const Matrix& A) {
  Matrix B = A;
  for (int i = 0; i < A.dim; ++i)
    for (int j = 0; j < A.dim; ++j) B.set(i, j, int32_t(F.mul(c, A.at(i, j))));
  return B;
}

// ---------- ambient field / entry subfield ----------

struct Ambient {
  GroupSpec spec;
  int variant = 0;
  FieldCtx F;
  RootTower tw;
  int dim = 0;
  int64_t q = 0;
  std::vector<int64_t> entries;  // the subfield the matrix entries live in
};

Ambient make_ambient(const GroupSpec& spec, int variant) {
  Ambient amb;
  amb.spec = spec;
  amb.variant = variant;
  amb.dim = spec.dim;
  amb.q = spec.q.q;
  amb.F = make_field(spec.q.p, spec.q.e, spec.dim == 3 ? 6 : 2, kFieldCapDefault,
                     variant ? 1 : 0);
  amb.tw = root_tower(amb.q, spec.sign(), spec.dim);
  int64_t sub = spec.sign() == Sign::unitary ? amb.q * amb.q : amb.q;
  int64_t stride = (amb.F.Q - 1) / (sub - 1);
  amb.entries.push_back(0);
  for (int64_t k = 0; k < sub - 1; ++k) amb.entries.push_back(amb.F.antilog(k * stride));
  return amb;
}

// Hermitian (dim 3) or conjugate-skew (dim 2) form fixed by the group.
Matrix make_form(const Ambient& amb) {
  Matrix J;
  J.dim = amb.dim;
  const FieldCtx& F = amb.F;
  if (amb.dim == 3) {
    // antidiag(a, 1, a^q) is Hermitian; a = 1 by default, a = rho in variant 1
    int64_t a = amb.variant ? F.antilog(amb.tw.exp_rho) : 1;
    J.set(0, 2, int32_t(a));
    J.set(1, 1, 1);
    J.set(2, 0, int32_t(F.frobenius(a, amb.q)));
  } else {
    // [[0,1],[-1,0]]: conjugate-skew for odd q (Hermitian after scaling by a
    // trace-zero unit), plain antidiagonal Hermitian in characteristic 2; its
    // isometry group is GU(2,q^2) either way and the special subgroup consists
    // of F_q matrices
    J.set(0, 1, 1);
    J.set(1, 0, int32_t(F.neg(1)));
  }
  return J;
}

bool preserves_form(const Ambient& amb, const Matrix& J, const Matrix& M) {
  Matrix s = mat_star(amb.F, M, amb.q);
  return mat_mul(amb.F, mat_mul(amb.F, s, J), M) == J;
}

// ---------- element construction ----------

std::vector<Matrix> filter_linear(const Ambient& amb, bool det_one) {
  const int n = amb.dim * amb.dim;
  const int64_t base = int64_t(amb.entries.size());
  std::vector<int> odo(n, 0);
  std::vector<Matrix> out;
  Matrix M;
  M.dim = amb.dim;
  for (;;) {
    for (int i = 0; i < n; ++i) M.a[i] = int32_t(amb.entries[odo[i]]);
    int64_t det = mat_det(amb.F, M);
    if (det != 0 && (!det_one || det == 1)) out.push_back(M);
    int pos = 0;
    while (pos < n && ++odo[pos] == base) odo[pos++] = 0;
    if (pos == n) break;
  }
  return out;
}

// unitriangular / diagonal / antidiagonal candidates preserving J
std::vector<Matrix> unitary_generators(const Ambient& amb, const Matrix& J, bool det_one) {
  const FieldCtx& F = amb.F;
  const int d = amb.dim;
  std::vector<Matrix> gens;
  auto keep = [&](const Matrix& M) {
    if (mat_det(F, M) == 0) return;
    if (det_one && mat_det(F, M) != 1) return;
    if (!preserves_form(amb, J, M)) return;
    if (M == mat_identity(d)) return;
    gens.push_back(M);
  };
  const auto& E = amb.entries;
  if (d == 3) {
    for (int64_t x : E)
      for (int64_t y : E)
        for (int64_t z : E) {
          Matrix U = mat_identity(3);
          U.set(0, 1, int32_t(x));
          U.set(0, 2, int32_t(y));
          U.set(1, 2, int32_t(z));
          keep(U);
          Matrix L = mat_identity(3);
          L.set(1, 0, int32_t(x));
          L.set(2, 0, int32_t(y));
          L.set(2, 1, int32_t(z));
          keep(L);
        }
    for (int64_t a : E)
      for (int64_t b : E)
        for (int64_t c : E) {
          if (a == 0 || b == 0 || c == 0) continue;
          Matrix D;
          D.dim = 3;
          D.set(0, 0, int32_t(a));
          D.set(1, 1, int32_t(b));
          D.set(2, 2, int32_t(c));
          keep(D);
          Matrix W;
          W.dim = 3;
          W.set(0, 2, int32_t(a));
          W.set(1, 1, int32_t(b));
          W.set(2, 0, int32_t(c));
          keep(W);
        }
  } else {
    for (int64_t x : E) {
      Matrix U = mat_identity(2);
      U.set(0, 1, int32_t(x));
      keep(U);
      Matrix L = mat_identity(2);
      L.set(1, 0, int32_t(x));
      keep(L);
    }
    for (int64_t a : E)
      for (int64_t b : E) {
        if (a == 0 || b == 0) continue;
        Matrix D;
        D.dim = 2;
        D.set(0, 0, int32_t(a));
        D.set(1, 1, int32_t(b));
        keep(D);
        Matrix W;
        W.dim = 2;
        W.set(0, 1, int32_t(a));
        W.set(1, 0, int32_t(b));
        keep(W);
      }
  }
  return gens;
}

// transvections (plus one determinant generator for the full group): a
// conjugation-generating set for the filtered linear families
std::vector<Matrix> linear_generators(const Ambient& amb, bool det_one) {
  std::vector<Matrix> gens;
  const int d = amb.dim;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      for (size_t t = 1; t < amb.entries.size(); ++t) {
        Matrix M = mat_identity(d);
        M.set(i, j, int32_t(amb.entries[t]));
        gens.push_back(M);
      }
    }
  if (!det_one && amb.entries.size() > 2) {
    Matrix D = mat_identity(d);
    D.set(0, 0, int32_t(amb.entries[2]));  // entries[2] = primitive root of F_q
    gens.push_back(D);
  }
  return gens;
}

void index_elements(ExplicitGroup& g) {
  g.index.clear();
  g.index.reserve(g.elements.size() * 2);
  for (size_t i = 0; i < g.elements.size(); ++i) g.index.emplace(g.elements[i], int32_t(i));
}

std::vector<Matrix> closure(const Ambient& amb, const std::vector<Matrix>& gens,
                            int64_t expect) {
  std::vector<Matrix> elems;
  std::unordered_map<Matrix, int32_t, MatrixHash> seen;
  elems.push_back(mat_identity(amb.dim));
  seen.emplace(elems[0], 0);
  for (size_t head = 0; head < elems.size(); ++head) {
    Matrix x = elems[head];
    for (const Matrix& gmat : gens) {
      Matrix y = mat_mul(amb.F, x, gmat);
      if (seen.emplace(y, int32_t(elems.size())).second) {
        elems.push_back(y);
        if (int64_t(elems.size()) > expect)
          throw ClosureSizeMismatch("closure exceeds the group order");
      }
    }
  }
  if (int64_t(elems.size()) != expect) throw ClosureSizeMismatch("closure misses elements");
  return elems;
}

void partition_classes(ExplicitGroup& g, const std::vector<Matrix>& gens) {
  const FieldCtx& F = g.field;
  std::vector<std::pair<Matrix, Matrix>> conj;
  conj.reserve(gens.size());
  for (const Matrix& m : gens) conj.emplace_back(m, mat_inverse(F, m));
  const int32_t n = int32_t(g.elements.size());
  g.class_of.assign(n, -1);
  g.class_reps.clear();
  g.class_sizes.clear();
  std::vector<int32_t> stack;
  for (int32_t i = 0; i < n; ++i) {
    if (g.class_of[i] >= 0) continue;
    int32_t cid = int32_t(g.class_reps.size());
    g.class_reps.push_back(i);
    g.class_of[i] = cid;
    int64_t size = 1;
    stack.assign(1, i);
    while (!stack.empty()) {
      int32_t x = stack.back();
      stack.pop_back();
      for (const auto& [gm, gi] : conj) {
        Matrix y = mat_mul(F, mat_mul(F, gm, g.elements[x]), gi);
        int32_t yid = g.index.at(y);
        if (g.class_of[yid] < 0) {
          g.class_of[yid] = cid;
          ++size;
          stack.push_back(yid);
        }
      }
    }
    g.class_sizes.push_back(size);
  }
}

// ---------- label matching ----------

struct RootInfo {
  int64_t lam = 0;   // element index
  int alg = 0;
  int geom = 0;
};

int64_t exact_div(int64_t a, int64_t b, const char* what) {
  if (b == 0 || a % b != 0) throw LabelMismatch(std::string("dlog not divisible: ") + what);
  return a / b;
}

// split label of a regular-unipotent-type element: cube class (dim 3) or
// square class (dim 2) of det[v, Av, A^2 v] over the cyclic vector v
int split_label(const GroupSpec& spec, const FieldCtx& F, const RootTower& tw,
                const Matrix& A) {
  const int d = A.dim;
  for (int pick = 0; pick < d; ++pick) {
    Matrix W;
    W.dim = d;
    std::array<int64_t, 3> v{};
    v[pick] = 1;
    for (int c = 0; c < d; ++c) {
      for (int r = 0; r < d; ++r) W.set(r, c, int32_t(v[r]));
      std::array<int64_t, 3> nv{};
      for (int r = 0; r < d; ++r) {
        int64_t s = 0;
        for (int k = 0; k < d; ++k) s = F.add(s, F.mul(A.at(r, k), v[k]));
        nv[r] = s;
      }
      v = nv;
    }
    int64_t det = mat_det(F, W);
    if (det == 0) continue;
    if (d == 3) {
      int64_t stride = spec.sign() == Sign::unitary ? tw.exp_rho : tw.exp_omega;
      int64_t iota = exact_div(F.dlog(det), stride, "split invariant") % 3;
      return int((2 * iota) % 3);
    }
    // strip the central part: the square-class invariant lives on the
    // unipotent factor, and det[v,Av] picks up one factor of the eigenvalue
    int64_t lam = F.mul(F.add(A.at(0, 0), A.at(1, 1)), F.inv(F.from_int(2)));
    int64_t e = mod_reduce(F.dlog(det) - F.dlog(lam), F.Q - 1);
    int64_t iota = exact_div(e, tw.exp_sigma, "split invariant") % 2;
    return int(iota);
  }
  throw LabelMismatch("no cyclic vector for a split class");
}

ClassLabel label_one(const GroupSpec& spec, const FieldCtx& F, const RootTower& tw,
                     const Matrix& A) {
  const int d = A.dim;
  std::vector<RootInfo> roots;
  for (int64_t lam = 1; lam < F.Q; ++lam) {
    Matrix M = mat_sub_lambda(F, A, lam);
    if (mat_det(F, M) != 0) continue;
    RootInfo ri;
    ri.lam = lam;
    ri.geom = d - mat_rank(F, M);
    Matrix P = M;
    for (int k = 1; k < d; ++k) P = mat_mul(F, P, M);
    ri.alg = d - mat_rank(F, P);
    roots.push_back(ri);
  }
  int alg_total = 0;
  for (const RootInfo& r : roots) alg_total += r.alg;
  if (alg_total != d) throw LabelMismatch("characteristic polynomial does not split");

  auto omega_exp = [&](int64_t lam) {
    return exact_div(F.dlog(lam), tw.exp_omega, "omega exponent");
  };
  auto in_omega = [&](int64_t lam) { return F.dlog(lam) % tw.exp_omega == 0; };

  ClassLabel raw;
  bool needs_split = false;
  if (d == 3) {
    if (roots.size() == 1) {
      int64_t k = omega_exp(roots[0].lam);
      int series = roots[0].geom == 3 ? 1 : roots[0].geom == 2 ? 2 : 3;
      raw = ClassLabel{series, {k}, std::nullopt};
      needs_split = series == 3;
    } else if (roots.size() == 2) {
      const RootInfo& dbl = roots[0].alg == 2 ? roots[0] : roots[1];
      const RootInfo& sgl = roots[0].alg == 2 ? roots[1] : roots[0];
      if (dbl.alg != 2 || sgl.alg != 1) throw LabelMismatch("bad multiplicity pattern");
      int series = dbl.geom == 2 ? 4 : 5;
      raw = ClassLabel{series, {omega_exp(dbl.lam), omega_exp(sgl.lam)}, std::nullopt};
    } else if (roots.size() == 3) {
      int n_om = 0;
      for (const RootInfo& r : roots) n_om += in_omega(r.lam) ? 1 : 0;
      if (n_om == 3) {
        raw = ClassLabel{
            6, {omega_exp(roots[0].lam), omega_exp(roots[1].lam), omega_exp(roots[2].lam)},
            std::nullopt};
      } else if (n_om == 1) {
        int64_t k = 0, l = 0;
        bool have_l = false;
        for (const RootInfo& r : roots) {
          if (in_omega(r.lam)) {
            k = omega_exp(r.lam);
          } else if (!have_l) {
            l = exact_div(F.dlog(r.lam), tw.exp_rho, "rho exponent");
            have_l = true;
          }
        }
        raw = ClassLabel{7, {k, l}, std::nullopt};
      } else if (n_om == 0) {
        int64_t k = exact_div(F.dlog(roots[0].lam), tw.exp_theta, "theta exponent");
        raw = ClassLabel{8, {k}, std::nullopt};
      } else {
        throw LabelMismatch("impossible Omega pattern among eigenvalues");
      }
    } else {
      throw LabelMismatch("unexpected root count");
    }
  } else {
    if (roots.size() == 1) {
      int64_t k = omega_exp(roots[0].lam);
      int series = roots[0].geom == 2 ? 1 : 2;
      raw = ClassLabel{series, {k}, std::nullopt};
      needs_split = series == 2;
    } else if (roots.size() == 2 && in_omega(roots[0].lam) && in_omega(roots[1].lam)) {
      raw = ClassLabel{3, {omega_exp(roots[0].lam), omega_exp(roots[1].lam)}, std::nullopt};
    } else if (roots.size() == 2 && !in_omega(roots[0].lam) && !in_omega(roots[1].lam)) {
      raw = ClassLabel{4, {F.dlog(roots[0].lam)}, std::nullopt};
    } else {
      throw LabelMismatch("impossible Omega pattern among eigenvalues");
    }
  }
  if (needs_split && has_split_classes(spec)) raw.split = split_label(spec, F, tw, A);
  try {
    return canonical_label(spec, raw);
  } catch (const Error& e) {
    throw LabelMismatch(std::string("matched label rejected by the catalog: ") + e.what());
  }
}

void build_kappa(ExplicitGroup& g) {
  const int32_t C = g.class_count();
  const int32_t n = int32_t(g.elements.size());
  g.kappa.assign(size_t(C) * C * C, 0);
  for (int32_t dcl = 0; dcl < C; ++dcl) {
    const Matrix& z = g.elements[g.class_reps[dcl]];
    for (int32_t y = 0; y < n; ++y) {
      int32_t b = g.class_of[y];
      int32_t e = g.class_of[g.index.at(mat_mul(g.field, z, g.elements[y]))];
      ++g.kappa[(size_t(dcl) * C + b) * C + e];
    }
  }
}

void finish_group(ExplicitGroup& g) {
  // labels plus the invariant asserts that certify them
  g.labels = match_labels(g);
  g.label_index.clear();
  for (int32_t c = 0; c < g.class_count(); ++c) {
    if (!g.label_index.emplace(g.labels[c], c).second)
      throw LabelMismatch("two classes matched the same label: " + to_string(g.labels[c]));
  }
  std::vector<ClassLabel> expected = enumerate_classes(g.spec);
  if (expected.size() != g.labels.size())
    throw LabelMismatch("class count disagrees with the catalog");
  for (const ClassLabel& lab : expected)
    if (!g.label_index.count(lab))
      throw LabelMismatch("catalog class not realized: " + to_string(lab));
  for (int32_t c = 0; c < g.class_count(); ++c) {
    ClassData cd = class_data(g.spec, g.labels[c]);
    if (cd.size != g.class_sizes[c])
      throw LabelMismatch("class size disagrees with the catalog: " + to_string(g.labels[c]));
    if (!g.spec.is_P()) {
      const Matrix& rep = g.elements[g.class_reps[c]];
      int64_t det = mat_det(g.field, rep);
      if (g.spec.is_S()) {
        if (det != 1) throw LabelMismatch("special-group element with det != 1");
      } else if (mod_reduce(g.field.dlog(det), g.tower.N) != cd.det_exp) {
        throw LabelMismatch("determinant exponent mismatch: " + to_string(g.labels[c]));
      }
    }
  }

  g.identity_class = g.class_of[g.index.at(mat_identity(g.spec.dim))];
  if (!(g.labels[g.identity_class] == ClassLabel{1, {0}, std::nullopt}))
    throw LabelMismatch("identity not labeled C1[0]");

  g.inverse_of_class.assign(g.class_count(), 0);
  for (int32_t c = 0; c < g.class_count(); ++c) {
    Matrix inv = mat_inverse(g.field, g.elements[g.class_reps[c]]);
    g.inverse_of_class[c] = g.class_of[g.index.at(inv)];
  }
  build_kappa(g);
}

// ---------- quotient construction (PSL / PSU) ----------

ExplicitGroup quotient_group(const ExplicitGroup& s, const GroupSpec& pspec) {
  ExplicitGroup g;
  g.spec = pspec;
  g.variant = s.variant;
  g.field = s.field;
  g.tower = s.tower;
  g.form = s.form;
  const FieldCtx& F = g.field;
  int64_t P = q_pm1(pspec.q.q, pspec.sign());
  if (P % 3 != 0) {
    // trivial center: same group, relabeled through the projective catalog
    g.elements = s.elements;
    g.index = s.index;
    g.class_of = s.class_of;
    g.class_reps = s.class_reps;
    g.class_sizes = s.class_sizes;
    finish_group(g);
    return g;
  }
  int64_t r = P / 3;
  Matrix z = mat_scale(F, F.antilog(g.tower.exp_omega * r), mat_identity(3));
  Matrix z2 = mat_mul(F, z, z);

  const int32_t ns = int32_t(s.elements.size());
  std::vector<int32_t> rep_of(ns);
  for (int32_t i = 0; i < ns; ++i) {
    int32_t a = s.index.at(mat_mul(F, z, s.elements[i]));
    int32_t b = s.index.at(mat_mul(F, z2, s.elements[i]));
    rep_of[i] = std::min(i, std::min(a, b));
  }
  std::vector<int32_t> pid(ns, -1);
  for (int32_t i = 0; i < ns; ++i) {
    if (rep_of[i] != i) continue;
    pid[i] = int32_t(g.elements.size());
    g.elements.push_back(s.elements[i]);
  }
  g.index.reserve(ns * 2);
  for (int32_t i = 0; i < ns; ++i) g.index.emplace(s.elements[i], pid[rep_of[i]]);

  // the class representatives of the covering group generate it, so they
  // drive the conjugation orbits of the quotient
  std::vector<Matrix> gens;
  for (int32_t rep : s.class_reps) gens.push_back(s.elements[rep]);
  partition_classes(g, gens);
  finish_group(g);
  return g;
}

// ---------- cache serialization ----------

constexpr uint32_t kCacheMagic = 0x43504F52u;  // "CPOR"
constexpr uint32_t kCacheVersion = 2;

struct Writer {
  std::string buf;
  void raw(const void* p, size_t n) { buf.append(static_cast<const char*>(p), n); }
  void u32(uint32_t v) { raw(&v, 4); }
  void i32(int32_t v) { raw(&v, 4); }
  void i64(int64_t v) { raw(&v, 8); }
  void str(const std::string& s) {
    u32(uint32_t(s.size()));
    raw(s.data(), s.size());
  }
};

struct Reader {
  const std::string& buf;
  size_t pos = 0;
  void raw(void* p, size_t n) {
    if (pos + n > buf.size()) throw Error("oracle cache: truncated");
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  }
  uint32_t u32() {
    uint32_t v;
    raw(&v, 4);
    return v;
  }
  int32_t i32() {
    int32_t v;
    raw(&v, 4);
    return v;
  }
  int64_t i64() {
    int64_t v;
    raw(&v, 8);
    return v;
  }
  std::string str() {
    uint32_t n = u32();
    if (pos + n > buf.size()) throw Error("oracle cache: truncated");
    std::string s(buf.data() + pos, n);
    pos += n;
    return s;
  }
};

uint64_t fnv_bytes(const char* p, size_t n) {
  uint64_t h = 1469598103934665603ull;
  for (size_t i = 0; i < n; ++i) {
    h ^= uint8_t(p[i]);
    h *= 1099511628211ull;
  }
  return h;
}

// ---------- build paths ----------

ExplicitGroup build_fresh(const GroupSpec& spec, int64_t cap, int variant);

const ExplicitGroup& registry_build(const GroupSpec& spec, int64_t cap, int variant) {
  // recursive: a projective build re-enters here for its special subgroup
  static std::recursive_mutex mu;
  static std::map<std::pair<GroupSpec, int>, std::unique_ptr<ExplicitGroup>> reg;
  std::lock_guard<std::recursive_mutex> lock(mu);
  auto key = std::make_pair(spec, variant);
  auto it = reg.find(key);
  if (it != reg.end()) return *it->second;

  if (group_order(spec) > cap) throw CapacityExceeded("group order exceeds the oracle cap");

  std::unique_ptr<ExplicitGroup> g;
  std::string path = cache_file_path(spec, variant);
  if (!spec.is_P() && !path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::ostringstream ss;
      ss << in.rdbuf();
      try {
        auto loaded = std::make_unique<ExplicitGroup>(deserialize_group(ss.str()));
        if (loaded->spec == spec && loaded->variant == variant) g = std::move(loaded);
      } catch (const Error&) {
        // stale or corrupt cache: rebuild below
      }
    }
  }
  if (!g) {
    g = std::make_unique<ExplicitGroup>(build_fresh(spec, cap, variant));
    if (!spec.is_P() && !path.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(std::filesystem::path(path).parent_path(), ec);
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (out) {
        std::string bytes = serialize_group(*g);
        out.write(bytes.data(), std::streamsize(bytes.size()));
      }
    }
  }
  auto [pos, inserted] = reg.emplace(key, std::move(g));
  (void)inserted;
  return *pos->second;
}

ExplicitGroup build_fresh(const GroupSpec& spec, int64_t cap, int variant) {
  if (group_order(spec) > cap) throw CapacityExceeded("group order exceeds the oracle cap");
  if (spec.is_P()) {
    GroupSpec sspec = make_group(spec.family == Family::PSL ? Family::SL : Family::SU,
                                 spec.dim, spec.q.q);
    const ExplicitGroup& s = registry_build(sspec, cap, variant);
    return quotient_group(s, spec);
  }
  Ambient amb = make_ambient(spec, variant);
  ExplicitGroup g;
  g.spec = spec;
  g.variant = variant;
  g.field = amb.F;
  g.tower = amb.tw;
  g.form = make_form(amb);

  int64_t order = int64_t(group_order(spec));
  bool det_one = spec.is_S();
  std::vector<Matrix> conj_gens;
  if (spec.sign() == Sign::unitary) {
    conj_gens = unitary_generators(amb, g.form, det_one);
    g.elements = closure(amb, conj_gens, order);
  } else {
    g.elements = filter_linear(amb, det_one);
    if (int64_t(g.elements.size()) != order)
      throw ClosureSizeMismatch("filtered element count disagrees with the group order");
    conj_gens = linear_generators(amb, det_one);
  }
  index_elements(g);
  partition_classes(g, conj_gens);
  finish_group(g);
  return g;
}

}  // namespace

// ---------- public API ----------

int32_t ExplicitGroup::class_index(const ClassLabel& label) const {
  ClassLabel can = canonical_label(spec, label);
  auto it = label_index.find(can);
  if (it == label_index.end())
    throw InvalidParams("label not found in the explicit group: " + to_string(label));
  return it->second;
}

const ExplicitGroup& build(const GroupSpec& spec, int64_t cap, int variant) {
  return registry_build(spec, cap, variant);
}

ExplicitGroup build_uncached(const GroupSpec& spec, int64_t cap, int variant) {
  return build_fresh(spec, cap, variant);
}

std::vector<ClassLabel> match_labels(const ExplicitGroup& g) {
  std::vector<ClassLabel> out;
  out.reserve(g.class_reps.size());
  for (int32_t rep : g.class_reps)
    out.push_back(label_one(g.spec, g.field, g.tower, g.elements[rep]));
  return out;
}

Int n_oracle_by_index(const ExplicitGroup& g, const std::vector<int32_t>& ids) {
  if (ids.size() < 2) throw InvalidParams("need at least two classes");
  if (ids.size() > 12) throw TupleTooLong("tuple length exceeds 12");
  const int32_t C = g.class_count();
  for (int32_t id : ids)
    if (id < 0 || id >= C) throw IndexOutOfRange("class id out of range");
  if (ids.size() == 3) {
    // one int64 pass: kappa values are bounded by class sizes, so the sum is
    // bounded by |c2| * |c3| < 2^63
    int64_t total = 0;
    for (int32_t dcl = 0; dcl < C; ++dcl)
      total += g.kap(ids[0], ids[1], dcl) * g.kap(dcl, ids[2], g.identity_class);
    return Int(g.class_sizes[ids[0]]) * total;
  }
  std::vector<Int> f(C, 0);
  f[ids[0]] = 1;
  for (size_t j = 1; j < ids.size(); ++j) {
    std::vector<Int> w(C, 0);
    for (int32_t dcl = 0; dcl < C; ++dcl) {
      if (f[dcl] == 0) continue;
      for (int32_t e = 0; e < C; ++e) {
        int64_t k = g.kap(dcl, ids[j], e);
        if (k) w[e] += f[dcl] * k;
      }
    }
    f = std::move(w);
  }
  return Int(g.class_sizes[ids[0]]) * f[g.identity_class];
}

Int n_oracle(const ExplicitGroup& g, const std::vector<ClassLabel>& labels) {
  std::vector<int32_t> ids;
  ids.reserve(labels.size());
  for (const ClassLabel& lab : labels) ids.push_back(g.class_index(lab));
  return n_oracle_by_index(g, ids);
}

bool check_prop_1_1(const ExplicitGroup& g) {
  if (g.spec.family != Family::GL || g.spec.dim != 3)
    throw WrongGroup("the eigenvalue-free product check applies to the full linear dim-3 group");
  int32_t c2 = g.class_index(ClassLabel{2, {0}, std::nullopt});
  for (int32_t c = 0; c < g.class_count(); ++c) {
    if (g.labels[c].series != 8) continue;
    if (n_oracle_by_index(g, {g.inverse_of_class[c], c, c2}) != 0) return false;
  }
  return true;
}

std::string serialize_group(const ExplicitGroup& g) {
  if (g.spec.is_P()) throw InvalidParams("projective groups are rebuilt, not cached");
  Writer w;
  w.u32(kCacheMagic);
  w.u32(kCacheVersion);
  w.str(to_string(g.spec));
  w.i32(g.variant);
  w.i32(g.spec.dim);
  w.u32(uint32_t(g.field.modulus.size()));
  for (int c : g.field.modulus) w.i32(c);
  w.i64(g.field.generator);
  w.i64(int64_t(g.elements.size()));
  w.i64(int64_t(g.class_reps.size()));
  for (const Matrix& m : g.elements)
    for (int i = 0; i < g.spec.dim * g.spec.dim; ++i) w.i32(m.a[i]);
  for (int32_t v : g.class_of) w.i32(v);
  for (int32_t v : g.class_reps) w.i32(v);
  for (int64_t v : g.class_sizes) w.i64(v);
  for (const ClassLabel& lab : g.labels) w.str(to_string(lab));
  for (int32_t v : g.inverse_of_class) w.i32(v);
  w.i32(g.identity_class);
  for (int64_t v : g.kappa) w.i64(v);
  uint64_t sum = fnv_bytes(w.buf.data(), w.buf.size());
  w.raw(&sum, 8);
  return std::move(w.buf);
}

ExplicitGroup deserialize_group(const std::string& bytes) {
  if (bytes.size() < 16) throw Error("oracle cache: truncated");
  uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  if (fnv_bytes(bytes.data(), bytes.size() - 8) != stored)
    throw Error("oracle cache: checksum mismatch");
  Reader r{bytes};
  if (r.u32() != kCacheMagic) throw Error("oracle cache: bad magic");
  if (r.u32() != kCacheVersion) throw Error("oracle cache: version mismatch");
  GroupSpec spec = parse_group(r.str());
  int variant = r.i32();
  int dim = r.i32();
  if (dim != spec.dim) throw Error("oracle cache: dimension mismatch");

  Ambient amb = make_ambient(spec, variant);
  uint32_t mlen = r.u32();
  if (mlen != amb.F.modulus.size()) throw Error("oracle cache: modulus mismatch");
  for (uint32_t i = 0; i < mlen; ++i)
    if (r.i32() != amb.F.modulus[i]) throw Error("oracle cache: modulus mismatch");
  if (r.i64() != amb.F.generator) throw Error("oracle cache: generator mismatch");

  ExplicitGroup g;
  g.spec = spec;
  g.variant = variant;
  g.field = amb.F;
  g.tower = amb.tw;
  g.form = make_form(amb);
  int64_t ne = r.i64();
  int64_t nc = r.i64();
  if (ne != int64_t(group_order(spec))) throw Error("oracle cache: element count mismatch");
  if (nc <= 0 || nc > ne) throw Error("oracle cache: class count out of range");
  g.elements.resize(size_t(ne));
  for (Matrix& m : g.elements) {
    m.dim = dim;
    for (int i = 0; i < dim * dim; ++i) m.a[i] = r.i32();
  }
  g.class_of.resize(size_t(ne));
  for (int32_t& v : g.class_of) v = r.i32();
  g.class_reps.resize(size_t(nc));
  for (int32_t& v : g.class_reps) v = r.i32();
  g.class_sizes.resize(size_t(nc));
  for (int64_t& v : g.class_sizes) v = r.i64();
  g.labels.resize(size_t(nc));
  for (ClassLabel& lab : g.labels) lab = canonical_label(spec, parse_label(r.str()));
  g.inverse_of_class.resize(size_t(nc));
  for (int32_t& v : g.inverse_of_class) v = r.i32();
  g.identity_class = r.i32();
  g.kappa.resize(size_t(nc) * nc * nc);
  for (int64_t& v : g.kappa) v = r.i64();
  if (r.pos != bytes.size() - 8) throw Error("oracle cache: trailing bytes");

  index_elements(g);
  g.label_index.clear();
  for (int32_t c = 0; c < g.class_count(); ++c) g.label_index.emplace(g.labels[c], c);
  int64_t total = std::accumulate(g.class_sizes.begin(), g.class_sizes.end(), int64_t(0));
  if (total != ne) throw Error("oracle cache: class sizes do not sum to the order");
  return g;
}

std::string cache_file_path(const GroupSpec& spec, int variant) {
  const char* dir = std::getenv("CLASSPROD_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return "";
  std::ostringstream name;
  name << to_string(spec) << "v" << variant << ".cpor";
  std::string file = name.str();
  for (char& c : file)
    if (c == ':') c = 'q';
  return (std::filesystem::path(dir) / file).string();
}

int64_t element_order(const ExplicitGroup& g, int32_t element_id) {
  if (element_id < 0 || element_id >= int32_t(g.elements.size()))
    throw IndexOutOfRange("element id out of range");
  Matrix id = mat_identity(g.spec.dim);
  Matrix acc = g.elements[element_id];
  int64_t ord = 1;
  while (!(acc == id)) {
    acc = mat_mul(g.field, acc, g.elements[element_id]);
    ++ord;
  }
  return ord;
}

int32_t class_of_element(const ExplicitGroup& g, const Matrix& m) {
  auto it = g.index.find(m);
  if (it == g.index.end()) throw InvalidParams("matrix is not a group element");
  return g.class_of[it->second];
}

}  // namespace classprod
