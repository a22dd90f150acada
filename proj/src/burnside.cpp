#include "classprod/burnside.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <utility>

namespace classprod {

namespace {

void check_length(size_t m) {
  if (m < 2) throw InvalidParams("a class tuple needs at least two entries");
  if (m > size_t(kTupleCap)) throw TupleTooLong("tuple longer than the supported cap");
}

// sum of the determinant exponents; the relation det(x_1 ... x_m) = 1 holds
// for some choice of representatives iff this vanishes
bool det_relation(const std::vector<ClassData>& cls, const RootTower& tw) {
  int64_t s = 0;
  for (const auto& c : cls) s = mod_reduce(s + c.det_exp, tw.N);
  return s == 0;
}

int64_t omega_exp(const EigenRec& e, const RootTower& tw) {
  if (!e.in_omega || e.tau_exp % tw.exp_omega != 0)
    throw Error("omega_exp: eigenvalue not in the norm-one subgroup");
  return e.tau_exp / tw.exp_omega;
}

// ---- selection sums -------------------------------------------------------
//
// A block sum runs over one eigenvalue selection per tuple entry and adds the
// weight product of every selection whose slot-wise exponent totals vanish.
// Options carry up to three parallel exponent slots (only the X6 block uses
// more than one).

struct Option {
  std::array<int64_t, 3> exp{0, 0, 0};
  Int weight = 1;
};

Int select_sum_direct(const std::vector<std::vector<Option>>& opts, int slots, int64_t N) {
  Int total = 0;
  auto rec = [&](auto&& self, size_t v, std::array<int64_t, 3> run, Int w) -> void {
    if (v == opts.size()) {
      for (int j = 0; j < slots; ++j)
        if (run[size_t(j)] != 0) return;
      total += w;
      return;
    }
    for (const Option& o : opts[v]) {
      std::array<int64_t, 3> nxt = run;
      for (int j = 0; j < slots; ++j) nxt[size_t(j)] = mod_reduce(nxt[size_t(j)] + o.exp[size_t(j)], N);
      self(self, v + 1, nxt, w * o.weight);
    }
  };
  rec(rec, 0, {0, 0, 0}, Int(1));
  return total;
}

constexpr int64_t kDirectCap = 2'000'000;   // odometer leaves
constexpr int64_t kStateCap = 4'000'000;    // DP states (P^3)

// unweighted three-slot count via dynamic programming on residue triples;
// used when the direct X6 box is too large
Int select_count_dp(const std::vector<std::vector<Option>>& opts, int64_t P) {
  if (P * P * P > kStateCap)
    throw CapacityExceeded("selection state space too large for the X6 block");
  const size_t S = size_t(P * P * P);
  std::vector<int64_t> cur(S, 0), nxt(S);
  cur[0] = 1;
  for (const auto& ov : opts) {
    std::fill(nxt.begin(), nxt.end(), 0);
    for (size_t st = 0; st < S; ++st) {
      if (cur[st] == 0) continue;
      int64_t s1 = int64_t(st) / (P * P), s2 = (int64_t(st) / P) % P, s3 = int64_t(st) % P;
      for (const Option& o : ov) {
        size_t to = size_t(((s1 + o.exp[0]) % P) * P * P + ((s2 + o.exp[1]) % P) * P +
                           (s3 + o.exp[2]) % P);
        nxt[to] += cur[st];
      }
    }
    cur.swap(nxt);
  }
  return Int(cur[0]);
}

// ---- the five collapsed blocks --------------------------------------------

Int block_xi1(const CharFamilySpec& fam, const std::vector<ClassData>& cls) {
  Int prod = 1;
  for (const auto& c : cls) {
    prod *= fam.coeff(c.series());
    if (prod == 0) return 0;
  }
  return prod;
}

Int block_xi2(const CharFamilySpec& fam, const std::vector<ClassData>& cls, const RootTower& tw) {
  std::vector<std::vector<Option>> opts;
  for (const auto& c : cls) {
    std::vector<Option> ov;
    for (int a = 1; a <= c.n_prime; ++a) {
      Int w = fam.coeff(c.series(), a);
      if (w == 0) continue;
      ov.push_back({{mod_reduce(c.eigens[size_t(a - 1)].tau_exp, tw.N), 0, 0}, std::move(w)});
    }
    if (ov.empty()) return 0;
    opts.push_back(std::move(ov));
  }
  return select_sum_direct(opts, 1, tw.N);
}

Int block_x6(const CharFamilySpec& fam, const std::vector<ClassData>& cls, const RootTower& tw) {
  Int coeff = 1;
  for (const auto& c : cls) {
    coeff *= fam.coeff(c.series());
    if (coeff == 0) return 0;
  }
  const auto& A6 = alpha_sets().A6;
  const int64_t P = tower_order(tw.N, tw.exp_omega);
  std::vector<std::vector<Option>> opts;
  int64_t leaves = 1;
  for (const auto& c : cls) {
    const auto& sets = A6.at(c.series());
    if (sets.empty()) return 0;
    std::vector<Option> ov;
    for (const auto& al : sets) {
      Option o;
      for (int j = 0; j < 3; ++j)
        o.exp[size_t(j)] = omega_exp(c.eigens[size_t(al[size_t(j)] - 1)], tw) % P;
      ov.push_back(o);
    }
    leaves *= int64_t(ov.size());
    opts.push_back(std::move(ov));
  }
  Int inner = leaves <= kDirectCap ? select_sum_direct(opts, 3, P) : select_count_dp(opts, P);
  return coeff * inner;
}

Int block_x7(const CharFamilySpec& fam, const std::vector<ClassData>& cls, const RootTower& tw) {
  Int coeff = 1;
  for (const auto& c : cls) {
    coeff *= fam.coeff(c.series());
    if (coeff == 0) return 0;
  }
  const auto& A7 = alpha_sets().A7;
  std::vector<std::vector<Option>> opts;
  for (const auto& c : cls) {
    const auto& sets = A7.at(c.series());
    if (sets.empty()) return 0;
    std::vector<Option> ov;
    for (const auto& al : sets) {
      Option o;
      for (int j = 0; j < 2; ++j)
        o.exp[size_t(j)] = mod_reduce(c.eigens[size_t(al[size_t(j)] - 1)].tau_exp, tw.N);
      ov.push_back(o);
    }
    opts.push_back(std::move(ov));
  }
  return coeff * select_sum_direct(opts, 2, tw.N);
}

Int block_x8(const CharFamilySpec& fam, const std::vector<ClassData>& cls, const RootTower& tw) {
  Int coeff = 1;
  for (const auto& c : cls) {
    coeff *= fam.coeff(c.series());
    if (coeff == 0) return 0;
  }
  std::vector<std::vector<Option>> opts;
  for (const auto& c : cls) {
    std::vector<Option> ov;
    for (int a = 0; a < c.n; ++a)
      ov.push_back({{mod_reduce(c.eigens[size_t(a)].tau_exp, tw.N), 0, 0}, Int(1)});
    opts.push_back(std::move(ov));
  }
  return coeff * select_sum_direct(opts, 1, tw.N);
}

// ---- shared dispatch helpers ----------------------------------------------

std::vector<int> sorted_order(const std::vector<ClassData>& cls) {
  std::vector<int> ord(cls.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(),
                   [&](int a, int b) { return cls[size_t(a)].series() > cls[size_t(b)].series(); });
  return ord;
}

ClassTuple reordered(const ClassTuple& t, const std::vector<int>& ord) {
  ClassTuple s;
  s.spec = t.spec;
  for (int i : ord) s.classes.push_back(t.classes[size_t(i)]);
  return s;
}

GroupSpec general_of(const GroupSpec& g) {
  return make_group(g.sign() == Sign::unitary ? Family::GU : Family::GL, g.dim, g.q.q);
}

GroupSpec special_of(const GroupSpec& g) {
  return make_group(g.sign() == Sign::unitary ? Family::SU : Family::SL, g.dim, g.q.q);
}

}  // namespace

// ---- public: tuples and deltas --------------------------------------------

ClassTuple tuple_of(const GroupSpec& spec, const std::vector<ClassLabel>& labels) {
  check_length(labels.size());
  ClassTuple t;
  t.spec = spec;
  for (const auto& l : labels) t.classes.push_back(class_data(spec, l));
  return t;
}

int delta(const ClassTuple& t, const std::vector<int>& a) {
  if (a.size() != t.classes.size())
    throw IndexOutOfRange("delta: selection length does not match the tuple");
  const RootTower& tw = catalog(t.spec).tower;
  int64_t s = 0;
  for (size_t v = 0; v < a.size(); ++v) {
    const ClassData& c = t.classes[v];
    if (a[v] < 1 || a[v] > c.n) throw IndexOutOfRange("delta: eigenvalue slot out of range");
    s = mod_reduce(s + c.eigens[size_t(a[v] - 1)].tau_exp, tw.N);
  }
  return s == 0 ? 1 : 0;
}

DeltaSummary delta_summary(const ClassTuple& t) {
  check_length(t.classes.size());
  const size_t m = t.classes.size();
  int64_t box = 1;
  for (const auto& c : t.classes) box *= c.n;
  if (box > 100'000) throw CapacityExceeded("delta_summary: selection box too large");

  DeltaSummary out;
  std::vector<int> a(m, 1);
  for (;;) {
    out.delta[a] = delta(t, a);
    size_t v = 0;
    while (v < m && a[v] == t.classes[v].n) a[v++] = 1;
    if (v == m) break;
    ++a[v];
  }
  for (const auto& [sel, d] : out.delta) out.Delta_prime += d;

  // graded sums over the Omega sub-box: the grade counts the entries of
  // series 4 or 5 whose double eigenvalue is selected
  for (const auto& [sel, d] : out.delta) {
    bool omega_sel = true;
    int grade = 0;
    for (size_t v = 0; v < m; ++v) {
      if (sel[v] > t.classes[v].n_prime) { omega_sel = false; break; }
      int sr = t.classes[v].series();
      if (sel[v] == 1 && (sr == 4 || sr == 5)) ++grade;
    }
    if (omega_sel) out.Delta_a[grade] += d;
  }

  if (t.spec.dim == 3) {
    // orbit sums over the X6/X7 selection sets, quotiented by the slot action
    const auto& as = alpha_sets();
    auto orbit_sum = [&](int slots) {
      Int acc = 0;
      std::vector<std::vector<std::array<int, 3>>> opts;
      for (const auto& c : t.classes) {
        std::vector<std::array<int, 3>> ov;
        if (slots == 3) {
          for (const auto& al : as.A6.at(c.series())) ov.push_back(al);
        } else {
          for (const auto& al : as.A7.at(c.series())) ov.push_back({al[0], al[1], 0});
        }
        if (ov.empty()) return Int(0);
        opts.push_back(std::move(ov));
      }
      const int perm3[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                               {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      std::set<std::vector<std::array<int, 3>>> seen;
      std::vector<std::array<int, 3>> pick(m);
      auto rec = [&](auto&& self, size_t v) -> void {
        if (v == m) {
          std::vector<std::array<int, 3>> canon = pick;
          const int nperm = slots == 3 ? 6 : 2;
          for (int p = 1; p < nperm; ++p) {
            std::vector<std::array<int, 3>> img(m);
            for (size_t u = 0; u < m; ++u) {
              if (slots == 3) {
                for (int j = 0; j < 3; ++j) img[u][size_t(j)] = pick[u][size_t(perm3[p][j])];
              } else {
                // the two-slot quotient swaps the paired selections (1,2) and
                // (1,3) of every series-7 entry at once; it is not a
                // coordinate swap (that would leave the selection sets)
                img[u] = pick[u];
                if (img[u][1] == 2) img[u][1] = 3;
                else if (img[u][1] == 3) img[u][1] = 2;
              }
            }
            if (img < canon) canon = img;
          }
          if (!seen.insert(canon).second) return;
          Int prod = 1;
          for (int j = 0; j < slots && prod != 0; ++j) {
            std::vector<int> col(m);
            for (size_t u = 0; u < m; ++u) col[u] = canon[u][size_t(j)];
            prod *= delta(t, col);
          }
          acc += prod;
          return;
        }
        for (const auto& o : opts[v]) {
          pick[v] = o;
          self(self, v + 1);
        }
      };
      rec(rec, 0);
      return acc;
    };
    out.Delta = orbit_sum(3) + orbit_sum(2);
  } else if (m == 3 && t.classes[0].n == 2 && t.classes[1].n == 2 && t.classes[2].n == 2) {
    // one representative per complementary selection pair
    out.Delta = Int(out.delta.at({1, 1, 1})) + Int(out.delta.at({1, 1, 2})) +
                Int(out.delta.at({1, 2, 1})) + Int(out.delta.at({2, 1, 1}));
  }
  return out;
}

// ---- public: the collapsed Burnside sum ------------------------------------

Rat nbar_G(const ClassTuple& t) {
  if (t.spec.dim != 3 || !t.spec.is_G())
    throw WrongGroup("nbar_G evaluates dim-3 general linear/unitary tuples");
  check_length(t.classes.size());
  const RootTower& tw = catalog(t.spec).tower;
  if (!det_relation(t.classes, tw)) return Rat(0);

  const int m = t.m();
  Rat total(0);
  for (const CharFamilySpec& fam : families(t.spec.q.q, t.spec.sign())) {
    Int inner;
    switch (fam.level) {
      case XiLevel::xi1: inner = block_xi1(fam, t.classes); break;
      case XiLevel::xi2: inner = block_xi2(fam, t.classes, tw); break;
      case XiLevel::xi3: inner = block_x6(fam, t.classes, tw); break;
      case XiLevel::xi4: inner = block_x7(fam, t.classes, tw); break;
      case XiLevel::xi5: inner = block_x8(fam, t.classes, tw); break;
    }
    if (inner == 0) continue;
    Int pref = 1;
    for (int64_t r : fam.param_ranges) pref *= r;
    total += fam.sym_factor * Rat(pref * inner) / Rat(int_pow(fam.dim_d, m - 2));
  }
  return total;
}

// ---- public: the det-1 subgroup sum ----------------------------------------

Rat nbar_S(const ClassTuple& t) {
  if (t.spec.dim != 3 || !t.spec.is_S())
    throw WrongGroup("nbar_S evaluates dim-3 special linear/unitary tuples");
  check_length(t.classes.size());
  const GroupSpec gspec = general_of(t.spec);
  const RootTower& tw = catalog(gspec).tower;
  const int64_t q = t.spec.q.q;
  const int64_t P = tower_order(tw.N, tw.exp_omega);
  const int m = t.m();

  ClassTuple g;
  g.spec = gspec;
  for (const auto& c : t.classes) {
    ClassLabel l = c.label;
    l.split.reset();
    g.classes.push_back(class_data(gspec, canonical_label(gspec, l)));
  }
  Rat base = nbar_G(g) / Rat(P);
  if (P % 3 != 0) return base;

  // entries in the class series that splits
  std::vector<size_t> split_idx;
  for (size_t v = 0; v < t.classes.size(); ++v)
    if (t.classes[v].series() == 3) split_idx.push_back(v);
  const size_t n = split_idx.size();
  if (n < 2) return base;  // the correction bracket vanishes identically

  const SRestriction sr = s_restriction(q, t.spec.sign());
  const Int sgn = t.spec.sign() == Sign::unitary ? -1 : 1;

  // first bracket: the split-character excess over the three cubic twists
  Int twist_sum = 0;
  for (int tt = 0; tt < 3; ++tt) {
    Int prod = 1;
    for (size_t v : split_idx) prod *= sr.split6_value(tt, int(*t.classes[v].label.split));
    twist_sum += prod;
  }
  Rat b1 = Rat(-int_pow(sgn, int(n)), 3) + Rat(twist_sum * int_pow(Int(3), int(n) - 2));
  if (b1 == 0) return base;

  // second bracket: the genuine degree-d6 character at (0, r, 2r) plus the
  // two twisted degree-d8 characters, over a common denominator
  const auto fams = families(q, t.spec.sign());
  const CharFamilySpec* f6 = nullptr;
  const CharFamilySpec* f8 = nullptr;
  for (const auto& f : fams) {
    if (f.name == "X6") f6 = &f;
    if (f.name == "X8") f8 = &f;
  }
  const Int d6m = int_pow(f6->dim_d, m - 2);
  const Int d8m = int_pow(f8->dim_d, m - 2);

  int64_t ksum = 0;
  for (size_t v : split_idx) ksum = mod_reduce(ksum + t.classes[v].label.params[0], P);

  CycSum acc = CycSum::zero(tw.N);
  {
    const auto dp = sr.d6_params();
    const std::vector<int64_t> p6(dp.begin(), dp.end());
    CycSum prod = CycSum::root(tw.N, 0);
    for (size_t v = 0; v < t.classes.size(); ++v) {
      if (t.classes[v].series() == 3) continue;
      prod = cyc_mul(prod, char_value(*f6, p6, g.classes[v], tw));
    }
    acc += prod.scaled(d8m);
  }
  for (int u = 1; u <= 2; ++u) {
    CycSum prod = CycSum::root(tw.N, mod_reduce(tw.exp_omega * mod_reduce(u * ksum, P), tw.N));
    for (size_t v = 0; v < t.classes.size(); ++v) {
      if (t.classes[v].series() == 3) continue;
      prod = cyc_mul(prod, char_value(*f8, {sr.d8_param(u)}, g.classes[v], tw));
    }
    acc += prod.scaled(d6m);
  }
  Rat b2 = cyc_rational(acc) / Rat(d6m * d8m);
  return base + b1 * b2;
}

// ---- public: full character-table cross sum --------------------------------

Rat nbar_charsum(const ClassTuple& t, int64_t q_cap) {
  if (t.spec.dim != 3 || !t.spec.is_G())
    throw WrongGroup("nbar_charsum evaluates dim-3 general linear/unitary tuples");
  check_length(t.classes.size());
  const int64_t q = t.spec.q.q;
  if (q > q_cap) throw CapacityExceeded("nbar_charsum: q above the configured cap");

  const RootTower& tw = catalog(t.spec).tower;
  const bool uni = t.spec.sign() == Sign::unitary;
  const int64_t P = tower_order(tw.N, tw.exp_omega);
  const int64_t M = uni ? q - 1 : q + 1;
  const int64_t D = uni ? q * q - q + 1 : q * q + q + 1;
  const int64_t T = uni ? q * q * q + 1 : q * q * q - 1;
  const int64_t q2m1 = q * q - 1;
  const int m = t.m();

  Rat total(0);
  for (const CharFamilySpec& fam : families(q, t.spec.sign())) {
    if (fam.name.find('\'') != std::string::npos) continue;  // genuine families only
    std::vector<std::vector<int64_t>> params;
    switch (fam.level) {
      case XiLevel::xi1:
        for (int64_t k = 0; k < P; ++k) params.push_back({k});
        break;
      case XiLevel::xi2:
        for (int64_t k = 0; k < P; ++k)
          for (int64_t l = 0; l < P; ++l)
            if (k != l) params.push_back({k, l});
        break;
      case XiLevel::xi3:
        for (int64_t k = 0; k < P; ++k)
          for (int64_t l = k + 1; l < P; ++l)
            for (int64_t mm = l + 1; mm < P; ++mm) params.push_back({k, l, mm});
        break;
      case XiLevel::xi4:
        for (int64_t k = 0; k < P; ++k)
          for (int64_t l = 0; l < q2m1; ++l) {
            if (l % M == 0) continue;
            if (l < mod_reduce((uni ? -q : q) * l, q2m1)) params.push_back({k, l});
          }
        break;
      case XiLevel::xi5:
        for (int64_t k = 1; k < T; ++k) {
          if (k % D == 0) continue;
          if (k <= mod_reduce(q * q * k, T) && k <= mod_reduce(q * q * q * q * k, T))
            params.push_back({k});
        }
        break;
    }
    CycSum fam_acc = CycSum::zero(tw.N);
    for (const auto& pr : params) {
      CycSum prod = CycSum::root(tw.N, 0);
      for (const auto& c : t.classes) prod = cyc_mul(prod, char_value(fam, pr, c, tw));
      fam_acc += prod;
    }
    if (fam_acc.is_zero()) continue;
    total += cyc_rational(fam_acc) / Rat(int_pow(fam.dim_d, m - 2));
  }
  return total;
}

// ---- closed forms ----------------------------------------------------------

namespace {

Int da(const DeltaSummary& ds, int g) {
  auto it = ds.Delta_a.find(g);
  return it == ds.Delta_a.end() ? Int(0) : it->second;
}

// dim-3 general groups, sorted series (i1 >= i2 >= i3), value N / |c_1|
Rat table4_value(const ClassTuple& st) {
  const int64_t q = st.spec.q.q;
  const int64_t s = st.spec.sign() == Sign::unitary ? 1 : -1;
  const int64_t dl = (1 - s) / 2;
  const int64_t Dq = q * q - s * q + 1;
  const int64_t Tq = q * q * q + s;
  const DeltaSummary ds = delta_summary(st);
  auto d = [&](int a, int b, int c) { return Int(ds.delta.at({a, b, c})); };
  const Int D0 = da(ds, 0), D1 = da(ds, 1), D2 = da(ds, 2);
  const Int Dd = ds.Delta, Dp = ds.Delta_prime;
  const Rat Q(q), S(s);

  const int key = st.classes[0].series() * 100 + st.classes[1].series() * 10 +
                  st.classes[2].series();
  switch (key) {
    case 222: return Rat(2 * q * q * dl + s * q - 2) * d(1, 1, 1);
    // the delta coefficient is 2q delta_L, not 2 delta_L: pinned by brute
    // force over GL(3,q), q = 2, 3 (inner values 4, 6); the unitary side
    // vanishes either way
    case 322: return Rat(2 * q * dl) * d(1, 1, 1);
    case 332:
      return Rat(q * q) * (1 - S * d(1, 1, 1)) + Rat(q - 1) * d(1, 1, 1) -
             Rat(4 * q * dl) * d(1, 1, 1);
    // delta coefficient q((q +- 1)^2 -+ 3); the collapsed form q^2 +- 2q - 2
    // holds only at the upper sign, and brute force over GL(3,q), q = 2, 3,
    // demands the lower one (inner values 16, 84 on the delta cell)
    case 333:
      return Rat(q * q * (q * q - 2)) +
             Rat(q * ((q + s) * (q + s) - 3 * s)) * d(1, 1, 1);
    case 422: return Rat(0);
    case 432: return Rat(0);
    case 433: return Rat(q * (q + s) * (q + s) * (q - s));
    case 442: return Rat(2 * (q * q - 1) * dl) * d(1, 1, 1);
    case 443: return Rat((q + s) * (q + s) * (q - s)) * d(1, 1, 1);
    case 444:
      return Rat(2 * q * q * dl + s) * d(1, 1, 1) +
             Rat(q * (q - s)) * (d(1, 1, 2) * d(1, 2, 1) * d(2, 1, 1));
    case 522: return Q * d(2, 1, 1);
    case 532: return Rat(q * (q + s)) * (1 - S * d(2, 1, 1));
    // the squared factor is (q +- 1)^2, opposite to the printed one: brute
    // force at q = 3 gives inner 72 = q(q-1)^2 (q+2+1) linear and
    // 48 = q(q+1)^2 (q-2) unitary
    case 533: return Rat(q * (q + s) * (q + s)) * (Rat(q - 2 * s) + d(2, 1, 1));
    case 542: return Rat(2 * q * dl + s) * d(1, 1, 1) + Q * d(2, 1, 1);
    case 543:
      return Rat(q + s) * (Q + Rat(2 * q * dl - 1) * d(1, 1, 1) - S * Q * d(2, 1, 1));
    case 544:
      return Rat(q + s) * d(1, 1, 1) + Q * d(2, 1, 1) * (1 - S * (d(1, 1, 2) * d(1, 2, 1)));
    case 552:
      return Rat(q * q + s * q) + Rat(2 * ((q - 1) * (q - 1) * dl - 1)) * d(1, 1, 1) -
             S * Rat(q * q + s * q) * D1 - S * Rat(q * q) * d(2, 2, 1);
    case 553:
      return Rat(q + s) * (Rat(q * (q * q - 2 * s * q - 2)) +
                           Rat(q * q - 4 * q * dl + 1) * d(1, 1, 1) + Rat(q * (q + s)) * D1 +
                           Rat(q * q) * d(2, 2, 1));
    case 554:
      return Rat(q * (q + s)) * (Rat(d(1, 1, 2) * d(1, 2, 1) * d(2, 1, 1)) - S * d(1, 2, 1) -
                                 S * d(2, 1, 1) + 1) -
             S * Rat(q * q) * d(2, 2, 1) + Rat(2 * q * q * dl - 2 * q - s) * d(1, 1, 1);
    case 555: throw NoClosedForm("no closed form for the (5,5,5) row");
    case 622: return Rat(q + s) * D0;
    case 632: return Rat((q + s) * (q + s)) * (1 - S * D0);
    case 633: return Rat((q + s) * (q + s)) * (Rat(q * q - 2 * s * q - 1) + Rat(q + s) * D0);
    case 642: return Rat(q + s) * D1;
    case 643: return Rat((q + s) * (q + s)) * (1 - S * D1);
    case 644: return Rat(q + s) * D2 - S * Q * Dd;
    case 652: return Rat(q + s) * (Rat(q + s) * (1 - S * D1) - S * Q * D0);
    case 653:
      return Rat((q + s) * (q + s)) *
             (Rat(q * q - 3 * s * q - 1) + Rat(q + s) * D1 + Q * D0);
    case 654:
      return Rat(q + s) * (Rat(q + s) * (1 - S * D2) -
                           S * Q * (d(1, 2, 1) + d(2, 2, 1) + d(3, 2, 1)) + Q * Dd);
    case 655:
      return Rat(q + s) * (Rat((q + s) * (q * q - 4 * s * q - 1)) +
                           Rat((q + s) * (q + s)) * D2 + Rat(q * (q + s)) * (D1 - S * Dd) +
                           Rat(q * q) * D0);
    case 662: return Rat(q + s) * (Rat(q + s) - S * Q * D0 + Rat(2 * q - s) * Dd);
    case 663: return Rat(q * (q + s) * (q + s)) * (Rat(q - 4 * s) + D0 - S * Dd);
    case 664: return Rat(q + s) * (1 + Q * (1 - S * D1)) + Rat(q * q) * Dd;
    case 665:
      return Rat(q * (q + s)) *
             (Rat((q + s) * (q - 5 * s)) + Rat(q + s) * D1 + Q * D0 - S * Q * Dd);
    case 666:
      return Rat((q + s) * (q + s) * (q * q - 6 * s * q + 1)) + Rat(q * q * (q + s)) * D0 -
             S * Rat(q * q * q) * Dd;
    case 722: return Rat(q - s) * d(1, 1, 1);
    case 732: return Rat(q * q - 1) * (1 - S * d(1, 1, 1));
    case 733: return Rat((q + s) * (q * q - 1)) * (Rat(q - s) + d(1, 1, 1));
    case 742: return Rat(q - s) * d(1, 1, 1);
    case 743: return Rat(q * q - 1) * (1 - S * d(1, 1, 1));
    case 744: return Rat(q - s) * d(1, 1, 1);
    case 752:
      return Rat(q - s) * (Rat(q + s) * (1 - S * d(1, 1, 1)) - S * Q * d(1, 2, 1));
    // constant term is q^2 -+ q - 1: brute force at q = 3 (both signs) gives
    // inner values 11/13/14 (linear) and 5/9 (unitary) against the
    // delta-free/delta cells; the shape has no determinant-valid triple at
    // q = 2, so only q >= 3 distinguishes the readings
    case 753:
      return Rat(q * q - 1) * (Rat(q * q - s * q - 1) + Rat(q + s) * d(1, 1, 1) +
                               Q * d(1, 2, 1));
    case 754:
      return Rat(q - s) * (Rat(q + s) * (1 - S * d(1, 1, 1)) - S * Q * d(1, 2, 1));
    case 755:
      return Rat(q - s) * (Rat((q + s) * (q * q - 2 * s * q - 1)) +
                           Rat((q + s) * (q + s)) * d(1, 1, 1) + Rat(q * (q + s)) * D1 +
                           Rat(q * q) * d(1, 2, 2));
    case 762: return Rat(q - s) * (Rat(q + s) - S * Q * D0);
    case 763: return Rat(q * (q * q - 1)) * (Rat(q - 2 * s) + D0);
    case 764: return Rat(q - s) * (Rat(q + s) - S * Q * D1);
    case 765:
      return Rat(q * (q - s)) * (Rat((q + s) * (q - 3 * s)) + Rat(q + s) * D1 + Q * D0);
    case 766: return Rat(q - s) * (Rat((q + s) * (q * q - 4 * s * q + 1)) + Rat(q * q) * D0);
    // leading constant is q + s (both readings coincide in the unitary case;
    // the linear case is pinned by the brute-force count over GL(3,2))
    case 772: return Rat(q - s) * (Rat(q + s) - S * Q * d(1, 1, 1) + S * Dd);
    case 773: return Rat(q * (q * q - 1)) * (Q + d(1, 1, 1) + S * Dd);
    case 774: return Rat(q - s) * (Rat(q + s) - S * Q * d(1, 1, 1)) + Rat(q * q) * Dd;
    case 775:
      return Rat(q * (q - s)) * (Rat(q * q - 1) + Rat(q + s) * d(1, 1, 1) + Q * d(1, 1, 2) +
                                 S * Q * Dd);
    case 776: return Rat(q - s) * (Rat((q * q - 1) * (q - s)) + Rat(q * q) * D0);
    case 777:
      return Rat(q * q * q * q - 1) + Rat(q * q * (q - s)) * d(1, 1, 1) +
             S * Rat(q * q * q) * Dd;
    case 822: return Rat(0);
    case 832: return Rat(Dq);
    case 833: return Rat(Dq) * Rat(q * q + s * q - 1);
    case 842: return Rat(0);
    case 843: return Rat(Dq);
    case 844: return Rat(0);
    case 852: return Rat(Dq);
    case 853: return Rat(q * q - 1) * Rat(Dq);
    case 854: return Rat(Dq);
    // second factor is q^2 -+ q - 1 (the whole row is (q^2 -+ q)^2 - 1);
    // brute force at q = 3: inner 143 linear, 35 unitary
    case 855: return Rat(Dq) * Rat(q * q - s * q - 1);
    case 862: return Rat(Dq);
    case 863: return Rat(q * (q - s)) * Rat(Dq);
    case 864: return Rat(Dq);
    case 865: return Rat(q * (q - 2 * s)) * Rat(Dq);
    case 866: return Rat(Dq) * Rat(q * q - 3 * s * q + 1);
    case 872: return Rat(Dq);
    case 873: return Rat(q) * Rat(Tq);
    case 874: return Rat(Dq);
    case 875: return Rat(q * q) * Rat(Dq);
    case 876: return Rat(Dq) * Rat(Dq);
    case 877: return Rat(q * q * q * q + q * q + 1);
    case 882: return Rat(Dq) * (1 - Rat(Dp) / 3);
    case 883: return Rat(q) * Rat(Dq) * (Rat(q + 2 * s) - S * Rat(Dp) / 3);
    case 884: return Rat(Dq);
    case 885: return Rat(q) * Rat(Tq);
    case 886: return Rat(q * q + 1) * Rat(Dq);
    case 887: return Rat(q + s) * Rat(Tq);
    case 888:
      return Rat(Dq) * Rat(q * q + 3 * s * q + 1) - S * Rat(q * q * q) * Rat(Dp) / 3;
    default: throw NoClosedForm("series triple outside the closed-form table");
  }
}

// dim-3 special groups, rows (3,3,x); value N / |c_1| with c_1 the first
// split entry
Rat table7_value(const ClassTuple& t) {
  const int64_t q = t.spec.q.q;
  const int64_t s = t.spec.sign() == Sign::unitary ? 1 : -1;
  const int64_t dl = (1 - s) / 2;
  const int64_t P = s == 1 ? q + 1 : q - 1;
  if (P % 3 != 0) throw NoClosedForm("split rows need 3 | q -+ 1");
  const int64_t r = P / 3;

  std::vector<int> ord = sorted_order(t.classes);
  ClassTuple st = reordered(t, ord);
  std::vector<const ClassData*> c3;
  const ClassData* other = nullptr;
  for (const auto& c : st.classes) {
    if (c.series() == 3) c3.push_back(&c);
    else other = &c;
  }
  if (c3.size() < 2) throw NoClosedForm("split rows need two split entries");

  const DeltaSummary ds = delta_summary(st);
  auto d = [&](int a, int b, int c) { return Int(ds.delta.at({a, b, c})); };
  const Rat Q(q);

  if (c3.size() == 3) {
    int l1 = *c3[0]->label.split, l2 = *c3[1]->label.split, l3 = *c3[2]->label.split;
    const Int d111 = d(1, 1, 1);
    int equal = (l1 == l2) + (l1 == l3) + (l2 == l3);
    if (equal == 0)
      return Rat(q * r) * (Rat(q * r) + Rat(2 * q * r - s * q + r) * d111);
    if (equal == 1)
      return Rat(q * r) * (Rat(q * (r - s)) - Rat(q * r - s * q - r + 1) * d111);
    return Q * (Rat(q * (r * r - 1)) +
                Rat(2 * q * (r - s) * (r - s) + r * r - s) * d111);
  }

  const Int dstar = *c3[0]->label.split == *c3[1]->label.split ? 1 : 0;
  switch (other->series()) {
    case 2:
      return (Rat(q * q) - Rat(q * q - s * q + 1) * d(1, 1, 1)) * dstar +
             Rat(2 * q * r * dl) * d(1, 1, 1);
    case 4: return Rat(q * q) * dstar;
    case 5:
      return Rat(q * q * r) * (Rat(q - s) - Rat(3 * s) * dstar + d(2, 1, 1));
    case 6: {
      // leading term is (q -+ 1) r in both subcases (the readings coincide in
      // the unitary case; the linear case is pinned by the engine at q = 4,
      // 7, 13)
      const auto& p = other->label.params;
      bool aligned = (p[0] - p[1]) % 3 == 0 && (p[1] - p[2]) % 3 == 0;
      if (aligned)
        return Rat(q * q) * (Rat((q - s) * r) - Rat(2 * s * q) * dstar + Rat(r) * da(ds, 0));
      return Rat(q * q) *
             (Rat((q - s) * r) - Rat(s * q) * (1 - dstar) + Rat(r) * da(ds, 0));
    }
    case 7: return Rat(q * q * r) * (Rat(q - s) + d(1, 1, 1));
    case 8: {
      // the split-vs-cubic indicator combines the Z_3 coordinates of all
      // three entries: the scalar parts k/r of the split pair and the cubic
      // parameter divided by q -+ 1 (each is a Galois-orbit invariant mod 3)
      int64_t kp = other->label.params[0] / P;
      int64_t k1 = c3[0]->label.params[0] / r, k2 = c3[1]->label.params[0] / r;
      const Int ds111 = mod_reduce(k1 + k2 + kp, 3) == 0 ? 1 : 0;
      // leading term (q -+ 1) r, as in the series-6 row
      return Rat(q * q) *
             (Rat((q - s) * r) + Rat(s * q) * (dstar + ds111 - 3 * dstar * ds111));
    }
    default: throw NoClosedForm("series triple outside the split closed-form table");
  }
}

// dim-2 general groups, sorted series (i1 >= i2 >= i3), value N / |c_1|
Rat table8_value(const ClassTuple& st) {
  const int64_t q = st.spec.q.q;
  const int64_t s = st.spec.sign() == Sign::unitary ? 1 : -1;
  const DeltaSummary ds = delta_summary(st);
  auto d = [&](int a, int b, int c) { return Int(ds.delta.at({a, b, c})); };
  const Rat S(s), Q(q);

  const int key = st.classes[0].series() * 100 + st.classes[1].series() * 10 +
                  st.classes[2].series();
  switch (key) {
    case 222: return Q - 2 * Rat(d(1, 1, 1));
    case 322: return Rat(q + s);
    case 332: return Rat(q + s) * (1 - S * (d(1, 1, 1) + d(1, 2, 1)));
    case 333: return Rat(q + s) - S * Q * ds.Delta;
    case 422: return Rat(q - s);
    case 432: return Rat(q - s);
    case 433: return Rat(q - s);
    case 442: return Rat(q - s) * (1 + S * (d(1, 1, 1) + d(1, 2, 1)));
    case 443: return Rat(q - s);
    case 444: return Rat(q - s) + S * Q * ds.Delta;
    default: throw NoClosedForm("series triple outside the closed-form table");
  }
}

// dim-2 special groups in the linear picture, q odd, at least two split
// entries; value N / |c_1| with c_1 the first split entry
Rat dim2_special_value(const ClassTuple& t) {
  const int64_t q = t.spec.q.q;
  const int64_t r = (q + 1) / 2;       // unitary-picture parameter
  const int64_t rp = (q - 1) / 2;      // linear-picture split stride
  const int64_t er = 1 - (r % 2);
  std::vector<int> ord = sorted_order(t.classes);
  // split entries (series 2) ahead of a series-3/4 companion
  std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
    return (t.classes[size_t(a)].series() == 2) > (t.classes[size_t(b)].series() == 2);
  });
  ClassTuple st = reordered(t, ord);
  std::vector<const ClassData*> c2;
  const ClassData* other = nullptr;
  for (const auto& c : st.classes) {
    if (c.series() == 2) c2.push_back(&c);
    else other = &c;
  }
  if (c2.size() < 2) throw NoClosedForm("split rows need two split entries");
  const Rat c1(c2[0]->size);

  if (c2.size() == 3) {
    const Int d111 = delta(st, {1, 1, 1});
    int l1 = *c2[0]->label.split, l2 = *c2[1]->label.split, l3 = *c2[2]->label.split;
    Rat NS;
    if (l1 == l2 && l2 == l3)
      NS = Rat(r * (r - 1)) * (Rat(2 * q) - Rat(3 * r - 3 * er + 1) * d111);
    else
      NS = Rat(r * (r - 1) * (r - er - 1)) * d111;
    return NS / c1;
  }

  // unitary-picture parities of the two split entries
  const int64_t kap1 = c2[0]->label.params[0] / rp;
  const int64_t kap2 = c2[1]->label.params[0] / rp;
  const int l1 = *c2[0]->label.split, l2 = *c2[1]->label.split;
  int dstar = 0;
  if (other->series() == 4) {
    // companion on the norm-one torus of the unitary picture
    const int64_t k3 = other->label.params[0] / (q - 1);
    dstar = mod_reduce(r + kap1 * r + kap2 * r + k3 + l1 + l2, 2) == 0 ? 1 : 0;
  } else {
    // companion on the split torus of the linear picture
    const int64_t k3 = other->label.params[0];
    if (r % 2 == 0)
      dstar = mod_reduce(k3 + kap1 + kap2 + l1 + l2, 2) == 1 ? 1 : 0;
    else
      dstar = mod_reduce(k3 + l1 + l2, 2) == 0 ? 1 : 0;
  }
  return Rat(q * r * (q - 1)) * dstar / c1;
}

}  // namespace

Rat closed_form_triple(const ClassTuple& t) {
  if (t.classes.size() != 3) throw NoClosedForm("closed forms cover triples only");
  for (const auto& c : t.classes)
    if (c.series() == 1) throw NoClosedForm("central entries have no table row");
  const RootTower& tw = catalog(t.spec).tower;
  if (!det_relation(t.classes, tw)) return Rat(0);

  if (t.spec.dim == 3 && t.spec.is_G()) return table4_value(reordered(t, sorted_order(t.classes)));
  if (t.spec.dim == 3 && t.spec.is_S()) {
    int n3 = 0;
    for (const auto& c : t.classes)
      if (c.series() == 3 && c.label.split) ++n3;
    if (n3 < 2) throw NoClosedForm("split rows need two split entries");
    return table7_value(t);
  }
  if (t.spec.dim == 2 && t.spec.is_G()) return table8_value(reordered(t, sorted_order(t.classes)));
  if (t.spec.dim == 2 && t.spec.is_S()) {
    if (t.spec.family == Family::SU) {
      ClassTuple sl;
      sl.spec = make_group(Family::SL, 2, t.spec.q.q);
      for (const auto& c : t.classes)
        sl.classes.push_back(class_data(sl.spec, su2_to_sl2(c.label, t.spec.q.q)));
      return closed_form_triple(sl);
    }
    if (t.spec.q.q % 2 == 0) throw NoClosedForm("even q reduces to the general-group table");
    int n2 = 0;
    for (const auto& c : t.classes)
      if (c.series() == 2) ++n2;
    if (n2 < 2) throw NoClosedForm("split rows need two split entries");
    return dim2_special_value(t);
  }
  throw NoClosedForm("no closed-form table for this group");
}

// ---- the counting dispatch -------------------------------------------------

namespace {

Int rat_count(const Rat& r, const char* what) {
  Int n = rat_to_int(r, what);
  if (n < 0) throw IntegralityViolation(std::string(what) + ": negative count");
  return n;
}

CountResult count_internal(const GroupSpec& spec, std::vector<ClassData> cls);

// fold the triple counts along the tuple: after step t, cur[k] is the number
// of ways x_1 ... x_{t+1} lands in a fixed element of class k
Int convolve(const GroupSpec& spec, const std::vector<ClassData>& cls) {
  const Catalog& cat = catalog(spec);
  const size_t K = cat.list.size();
  if (int64_t(K) * int64_t(K) * int64_t(cls.size()) > 40'000'000)
    throw CapacityExceeded("convolution over too large a class list");
  std::vector<Int> cur(K, 0);
  cur[size_t(cat.index_of(cls[0].label))] = 1;
  for (size_t step = 1; step < cls.size(); ++step) {
    std::vector<Int> nxt(K, 0);
    for (size_t k = 0; k < K; ++k) {
      if (cur[k] == 0) continue;
      for (size_t k2 = 0; k2 < K; ++k2) {
        const ClassData inv = class_data(spec, inverse_class(spec, cat.list[k2].label));
        Int n3 = count_internal(spec, {cat.list[k], cls[step], inv}).n;
        if (n3 == 0) continue;
        Int num = cur[k] * n3;
        if (num % cat.list[k2].size != 0)
          throw IntegralityViolation("convolution: non-integral transfer");
        nxt[k2] += num / cat.list[k2].size;
      }
    }
    cur.swap(nxt);
  }
  ClassLabel one{1, {0}, std::nullopt};
  return cur[size_t(cat.index_of(canonical_label(spec, one)))];
}

CountResult count_general(const GroupSpec& spec, std::vector<ClassData> cls) {
  ClassTuple t;
  t.spec = spec;
  t.classes = cls;
  if (cls.size() == 3) {
    try {
      ClassTuple st = reordered(t, sorted_order(cls));
      Rat cf = spec.dim == 3 ? table4_value(st) : table8_value(st);
      return {rat_count(cf * Rat(st.classes[0].size), "closed form"), "closed-form"};
    } catch (const NoClosedForm&) {
    }
  }
  if (spec.dim == 2) return {convolve(spec, cls), "convolution"};
  Rat nb = nbar_G(t);
  Rat scale(1);
  for (const auto& c : cls) scale *= Rat(c.size);
  scale /= Rat(group_order(spec));
  return {rat_count(scale * nb, "structure constant"), "sigma-g"};
}

CountResult count_special3(const GroupSpec& spec, std::vector<ClassData> cls) {
  const GroupSpec gspec = general_of(spec);
  int n3 = 0;
  for (const auto& c : cls)
    if (c.series() == 3 && c.label.split) ++n3;
  if (n3 <= 1) {
    std::vector<ClassData> gcls;
    for (const auto& c : cls) {
      ClassLabel l = c.label;
      l.split.reset();
      gcls.push_back(class_data(gspec, canonical_label(gspec, l)));
    }
    CountResult inner = count_general(gspec, std::move(gcls));
    if (n3 == 0) return {inner.n, "g-reduction[" + inner.method + "]"};
    if (inner.n % 3 != 0) throw IntegralityViolation("split orbit count not divisible by 3");
    return {inner.n / 3, "g-reduction/3[" + inner.method + "]"};
  }
  ClassTuple t;
  t.spec = spec;
  t.classes = cls;
  if (cls.size() == 3) {
    try {
      Rat cf = closed_form_triple(t);
      Int c1 = 0;
      for (const auto& c : cls)
        if (c.series() == 3) { c1 = c.size; break; }
      return {rat_count(cf * Rat(c1), "closed form"), "closed-form"};
    } catch (const NoClosedForm&) {
    }
  }
  Rat nb = nbar_S(t);
  Rat scale(1);
  for (const auto& c : cls) scale *= Rat(c.size);
  scale /= Rat(group_order(spec));
  return {rat_count(scale * nb, "structure constant"), "sigma-s"};
}

CountResult count_special2(const GroupSpec& spec, std::vector<ClassData> cls) {
  const int64_t q = spec.q.q;
  if (spec.family == Family::SU) {
    std::vector<ClassData> sl;
    const GroupSpec slspec = make_group(Family::SL, 2, q);
    for (const auto& c : cls) sl.push_back(class_data(slspec, su2_to_sl2(c.label, q)));
    CountResult inner = count_internal(slspec, std::move(sl));
    return {inner.n, inner.method};
  }
  const GroupSpec gspec = general_of(spec);
  int n2 = 0;
  for (const auto& c : cls)
    if (c.series() == 2 && c.label.split) ++n2;
  if (q % 2 == 0 || n2 <= 1) {
    std::vector<ClassData> gcls;
    for (const auto& c : cls) {
      ClassLabel l = c.label;
      l.split.reset();
      gcls.push_back(class_data(gspec, canonical_label(gspec, l)));
    }
    CountResult inner = count_general(gspec, std::move(gcls));
    if (q % 2 == 0 || n2 == 0) return {inner.n, "g-reduction[" + inner.method + "]"};
    if (inner.n % 2 != 0) throw IntegralityViolation("split orbit count not divisible by 2");
    return {inner.n / 2, "g-reduction/2[" + inner.method + "]"};
  }
  ClassTuple t;
  t.spec = spec;
  t.classes = cls;
  if (cls.size() == 3) {
    Rat cf = closed_form_triple(t);
    Int c1 = 0;
    for (const auto& c : cls)
      if (c.series() == 2) { c1 = c.size; break; }
    return {rat_count(cf * Rat(c1), "closed form"), "closed-form"};
  }
  return {convolve(spec, cls), "convolution"};
}

CountResult count_projective(const GroupSpec& spec, std::vector<ClassData> cls) {
  const GroupSpec sspec = special_of(spec);
  std::vector<ClassData> scls;
  for (const auto& c : cls) scls.push_back(class_data(sspec, canonical_label(sspec, c.label)));
  if (!has_split_classes(spec)) {
    CountResult inner = count_internal(sspec, std::move(scls));
    return {inner.n, "s-isomorphic[" + inner.method + "]"};
  }
  const int64_t P = spec.sign() == Sign::unitary ? spec.q.q + 1 : spec.q.q - 1;
  const int64_t r = P / 3;
  int stable = 0;
  for (const auto& c : scls)
    if (scalar_shift(sspec, c.label, r) == c.label) ++stable;
  Int total = 0;
  for (int j = 0; j < 3; ++j) {
    std::vector<ClassData> ext = scls;
    ext.push_back(class_data(sspec, canonical_label(sspec, ClassLabel{1, {j * r}, std::nullopt})));
    total += count_internal(sspec, std::move(ext)).n;
  }
  Int den = int_pow(Int(3), stable);
  if (total % den != 0) throw IntegralityViolation("projective count not divisible by 3^stable");
  return {total / den, "projective-sum"};
}

CountResult count_internal(const GroupSpec& spec, std::vector<ClassData> cls) {
  const RootTower& tw = catalog(spec).tower;
  const int64_t P = tower_order(tw.N, tw.exp_omega);

  // peel off central entries; their scalars shift into the first survivor
  int64_t kshift = 0;
  std::vector<ClassData> rest;
  for (const auto& c : cls) {
    if (c.series() == 1)
      kshift = mod_reduce(kshift + c.label.params[0], P);
    else
      rest.push_back(c);
  }
  if (rest.empty()) return {kshift == 0 ? 1 : 0, "central"};
  if (kshift != 0)
    rest[0] = class_data(spec, scalar_shift(spec, rest[0].label, kshift));
  if (rest.size() == 1) return {0, "central"};
  if (rest.size() == 2) {
    bool inv = inverse_class(spec, rest[0].label) == rest[1].label;
    return {inv ? rest[0].size : Int(0), "pair"};
  }
  if (!det_relation(rest, tw)) return {0, "det-relation"};

  if (spec.is_G()) return count_general(spec, std::move(rest));
  if (spec.is_S())
    return spec.dim == 3 ? count_special3(spec, std::move(rest))
                         : count_special2(spec, std::move(rest));
  return count_projective(spec, std::move(rest));
}

}  // namespace

CountResult n_count_explained(const ClassTuple& t) {
  check_length(t.classes.size());
  return count_internal(t.spec, t.classes);
}

Int n_count(const ClassTuple& t) { return n_count_explained(t).n; }

}  // namespace classprod
