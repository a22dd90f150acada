#include "classprod/classes.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <set>

namespace classprod {

namespace {

constexpr const char* kFamilyNames[] = {"GL", "GU", "SL", "SU", "PSL", "PSU"};

int64_t mulm(int64_t a, int64_t b, int64_t m) {
  __int128 r = static_cast<__int128>(a) * b % m;
  if (r < 0) r += m;
  return static_cast<int64_t>(r);
}

// derived constants of one group: P = |Omega| = q+-1, M = q-+1,
// D = q^2-+q+1, T = q^3+-1 (upper signs unitary, lower linear)
struct Ctx {
  GroupSpec g;
  RootTower t;
  int64_t q = 0, P = 0, M = 0, D = 0, T = 0, rho_mod = 0;
  bool splits = false;  // the group has split classes (S- and P-types only)
  int64_t r = 0;        // dim 3: P = 3r, dim 2: P = 2r; 0 when no splitting
};

Ctx ctx_of(const GroupSpec& g) {
  Ctx c;
  c.g = g;
  c.t = root_tower(g.q.q, g.sign(), g.dim);
  c.q = g.q.q;
  Sign s = g.sign();
  c.P = q_pm1(c.q, s);
  c.M = q_mp1(c.q, s);
  c.D = q2_mp_q_p1(c.q, s);
  c.T = q3_pm1(c.q, s);
  c.rho_mod = c.q * c.q - 1;
  if (!g.is_G()) {
    if (g.dim == 3 && c.P % 3 == 0) {
      c.splits = true;
      c.r = c.P / 3;
    }
    if (g.dim == 2 && c.q % 2 == 1) {
      c.splits = true;
      c.r = c.P / 2;
    }
  }
  return c;
}

int series_arity(int dim, int series) {
  if (dim == 3) {
    switch (series) {
      case 1: case 2: case 3: case 8: return 1;
      case 4: case 5: case 7: return 2;
      case 6: return 3;
    }
  } else {
    switch (series) {
      case 1: case 2: case 4: return 1;
      case 3: return 2;
    }
  }
  throw InvalidParams("no class series C" + std::to_string(series) +
                      " in dimension " + std::to_string(dim));
}

// reduce raw parameters to the canonical representative of the class;
// validates distinctness and the Omega-exclusion constraints
std::vector<int64_t> reduce_params(const Ctx& c, int series, std::vector<int64_t> p) {
  if (static_cast<int>(p.size()) != series_arity(c.g.dim, series))
    throw InvalidParams("class C" + std::to_string(series) + " takes " +
                        std::to_string(series_arity(c.g.dim, series)) + " parameter(s)");
  auto bad = [&](const std::string& why) {
    throw InvalidParams("C" + std::to_string(series) + ": " + why);
  };
  int64_t q = c.q;
  bool uni = c.g.sign() == Sign::unitary;
  if (c.g.dim == 3) {
    switch (series) {
      case 1: case 2: case 3:
        p[0] = mod_reduce(p[0], c.P);
        break;
      case 4: case 5:
        p[0] = mod_reduce(p[0], c.P);
        p[1] = mod_reduce(p[1], c.P);
        if (p[0] == p[1]) bad("eigenvalue exponents must be distinct");
        break;
      case 6:
        for (auto& x : p) x = mod_reduce(x, c.P);
        std::sort(p.begin(), p.end());
        if (p[0] == p[1] || p[1] == p[2]) bad("eigenvalue exponents must be distinct");
        break;
      case 7: {
        p[0] = mod_reduce(p[0], c.P);
        int64_t l = mod_reduce(p[1], c.rho_mod);
        if (l % c.M == 0) bad("second eigenvalue lies in Omega");
        int64_t mate = mod_reduce((uni ? -q : q) * l, c.rho_mod);
        p[1] = std::min(l, mate);
        break;
      }
      case 8: {
        int64_t k = mod_reduce(p[0], c.T);
        if (k % c.D == 0) bad("eigenvalue lies in Omega");
        int64_t q2 = (q * q) % c.T;
        int64_t k2 = mulm(k, q2, c.T);
        int64_t k4 = mulm(k2, q2, c.T);
        p[0] = std::min({k, k2, k4});
        break;
      }
    }
  } else {
    switch (series) {
      case 1: case 2:
        p[0] = mod_reduce(p[0], c.P);
        break;
      case 3:
        p[0] = mod_reduce(p[0], c.P);
        p[1] = mod_reduce(p[1], c.P);
        if (p[0] == p[1]) bad("eigenvalue exponents must be distinct");
        if (p[0] > p[1]) std::swap(p[0], p[1]);
        break;
      case 4: {
        int64_t k = mod_reduce(p[0], c.rho_mod);
        if (k % c.M == 0) bad("eigenvalue lies in Omega");
        int64_t mate = mod_reduce((uni ? -q : q) * k, c.rho_mod);
        p[0] = std::min(k, mate);
        break;
      }
    }
  }
  return p;
}

// tau-exponent of the determinant, mod N
int64_t det_exp_of(const Ctx& c, int series, const std::vector<int64_t>& p) {
  const RootTower& t = c.t;
  int64_t N = t.N;
  bool uni = c.g.sign() == Sign::unitary;
  int64_t f = uni ? 1 - c.q : 1 + c.q;  // rho^l pairs with rho^{-+ql}
  if (c.g.dim == 3) {
    switch (series) {
      case 1: case 2: case 3:
        return mulm(mod_reduce(3 * p[0], c.P), t.exp_omega, N);
      case 4: case 5:
        return mulm(mod_reduce(2 * p[0] + p[1], c.P), t.exp_omega, N);
      case 6:
        return mulm(mod_reduce(p[0] + p[1] + p[2], c.P), t.exp_omega, N);
      case 7: {
        int64_t a = mulm(p[0], t.exp_omega, N);
        int64_t b = mulm(mod_reduce(p[1] * f, c.rho_mod), t.exp_rho, N);
        return (a + b) % N;
      }
      case 8:
        return mulm(mulm(p[0], t.exp_theta, N), t.exp_rho, N);
    }
  } else {
    switch (series) {
      case 1: case 2:
        return mulm(mod_reduce(2 * p[0], c.P), t.exp_omega, N);
      case 3:
        return mulm(mod_reduce(p[0] + p[1], c.P), t.exp_omega, N);
      case 4:
        return mod_reduce(p[0] * f, N);
    }
  }
  throw InvalidParams("unreachable");
}

bool label_splits(const Ctx& c, int series) {
  if (!c.splits) return false;
  return (c.g.dim == 3) ? series == 3 : series == 2;
}

// shift a canonical label by the scalar omega^{kp}; kp is reduced mod P
ClassLabel shift_canonical(const Ctx& c, const ClassLabel& lab, int64_t kp) {
  kp = mod_reduce(kp, c.P);
  ClassLabel out = lab;
  auto& p = out.params;
  if (c.g.dim == 3) {
    switch (lab.series) {
      case 1: case 2: case 3: p[0] += kp; break;
      case 4: case 5: p[0] += kp; p[1] += kp; break;
      case 6: for (auto& x : p) x += kp; break;
      case 7: p[0] += kp; p[1] += kp * c.M; break;  // omega = rho^{q-+1}
      case 8: p[0] += kp * c.D; break;              // omega = theta^{q^2-+q+1}
    }
    // cube classes of det[v,Nv,N^2v] scale by omega^{3kp} = 1: split index kept
  } else {
    switch (lab.series) {
      case 1: case 2: p[0] += kp; break;
      case 3: p[0] += kp; p[1] += kp; break;
      case 4: p[0] += kp * c.M; break;
    }
    // the split index is the square class of the unipotent part's
    // off-diagonal entry, which central scaling does not touch
  }
  out.params = reduce_params(c, out.series, out.params);
  return out;
}

}  // namespace

GroupSpec make_group(Family f, int dim, int64_t q) {
  if (dim != 2 && dim != 3) throw InvalidParams("dimension must be 2 or 3");
  if ((f == Family::PSL || f == Family::PSU) && dim == 2)
    throw WrongGroup("projective groups are supported in dimension 3 only");
  GroupSpec g;
  g.family = f;
  g.dim = dim;
  g.q = parse_prime_power(q);
  return g;
}

GroupSpec parse_group(const std::string& text) {
  size_t i = 0, n = text.size();
  std::string fam;
  while (i < n && std::isalpha(static_cast<unsigned char>(text[i])))
    fam += static_cast<char>(std::toupper(static_cast<unsigned char>(text[i++])));
  int fi = -1;
  for (int j = 0; j < 6; ++j)
    if (fam == kFamilyNames[j]) fi = j;
  if (fi < 0) throw ParseError("unknown group family '" + fam + "'");
  if (i >= n || !std::isdigit(static_cast<unsigned char>(text[i])))
    throw ParseError("expected dimension in '" + text + "'");
  int dim = 0;
  while (i < n && std::isdigit(static_cast<unsigned char>(text[i])))
    dim = dim * 10 + (text[i++] - '0');
  if (i >= n || text[i] != ':') throw ParseError("expected ':' in '" + text + "'");
  ++i;
  if (i >= n || !std::isdigit(static_cast<unsigned char>(text[i])))
    throw ParseError("expected field size in '" + text + "'");
  int64_t q = 0;
  while (i < n && std::isdigit(static_cast<unsigned char>(text[i])))
    q = q * 10 + (text[i++] - '0');
  if (i != n) throw ParseError("trailing characters in '" + text + "'");
  return make_group(static_cast<Family>(fi), dim, q);
}

std::string to_string(const GroupSpec& g) {
  return std::string(kFamilyNames[static_cast<int>(g.family)]) +
         std::to_string(g.dim) + ":" + std::to_string(g.q.q);
}

Int group_order(const GroupSpec& g) {
  int64_t q = g.q.q;
  Int o;
  if (g.dim == 3) {
    Int q3 = Int(q) * q * q;
    if (g.sign() == Sign::unitary)
      o = q3 * (q + 1) * (Int(q) * q - 1) * (q3 + 1);
    else
      o = q3 * (q - 1) * (Int(q) * q - 1) * (q3 - 1);
    if (!g.is_G()) o /= q_pm1(q, g.sign());
    if (g.is_P()) o /= std::gcd<int64_t>(3, q_pm1(q, g.sign()));
  } else {
    Int base = Int(q) * (Int(q) * q - 1);
    if (g.is_G())
      o = base * (g.sign() == Sign::unitary ? q + 1 : q - 1);
    else
      o = base;
  }
  return o;
}

int64_t split_r(const GroupSpec& g) { return ctx_of(g).r; }
bool has_split_classes(const GroupSpec& g) { return ctx_of(g).splits; }

bool is_central(const ClassLabel& l) { return l.series == 1; }

ClassLabel canonical_label(const GroupSpec& g, const ClassLabel& raw) {
  Ctx c = ctx_of(g);
  int smax = g.dim == 3 ? 8 : 4;
  if (raw.series < 1 || raw.series > smax)
    throw InvalidParams("no class series C" + std::to_string(raw.series) +
                        " in dimension " + std::to_string(g.dim));
  ClassLabel lab;
  lab.series = raw.series;
  lab.params = reduce_params(c, raw.series, raw.params);
  if (g.is_G()) {
    if (raw.split)
      throw InvalidParams("split index on a class of a full group");
    return lab;
  }
  if (det_exp_of(c, lab.series, lab.params) != 0)
    throw InvalidParams("determinant is not 1");
  if (label_splits(c, lab.series)) {
    int nsplit = g.dim == 3 ? 3 : 2;
    if (!raw.split)
      throw InvalidParams("class splits; split index required");
    if (*raw.split < 0 || *raw.split >= nsplit)
      throw InvalidParams("split index out of range");
    lab.split = raw.split;
  } else if (raw.split) {
    throw InvalidParams("class does not split");
  }
  if (g.is_S()) return lab;
  // projective: least label over the central-shift orbit
  ClassLabel best = lab;
  if (c.splits)
    for (int64_t kp : {c.r, 2 * c.r}) {
      ClassLabel cand = shift_canonical(c, lab, kp);
      if (cand < best) best = cand;
    }
  return best;
}

std::vector<ClassLabel> enumerate_classes(const GroupSpec& g) {
  Ctx c = ctx_of(g);
  bool uni = g.sign() == Sign::unitary;
  std::vector<ClassLabel> glabels;
  auto add = [&](int s, std::vector<int64_t> p) {
    glabels.push_back({s, std::move(p), std::nullopt});
  };
  if (g.dim == 3) {
    for (int64_t k = 0; k < c.P; ++k) {
      add(1, {k});
      add(2, {k});
      add(3, {k});
    }
    for (int64_t k = 0; k < c.P; ++k)
      for (int64_t l = 0; l < c.P; ++l)
        if (l != k) {
          add(4, {k, l});
          add(5, {k, l});
        }
    for (int64_t k = 0; k < c.P; ++k)
      for (int64_t l = k + 1; l < c.P; ++l)
        for (int64_t m = l + 1; m < c.P; ++m) add(6, {k, l, m});
    for (int64_t l = 1; l < c.rho_mod; ++l) {
      if (l % c.M == 0) continue;
      int64_t mate = mod_reduce((uni ? -c.q : c.q) * l, c.rho_mod);
      if (l > mate) continue;
      for (int64_t k = 0; k < c.P; ++k) add(7, {k, l});
    }
    int64_t q2 = (c.q * c.q) % c.T;
    for (int64_t k = 1; k < c.T; ++k) {
      if (k % c.D == 0) continue;
      int64_t k2 = mulm(k, q2, c.T);
      int64_t k4 = mulm(k2, q2, c.T);
      if (k > k2 || k > k4) continue;
      add(8, {k});
    }
  } else {
    for (int64_t k = 0; k < c.P; ++k) {
      add(1, {k});
      add(2, {k});
    }
    for (int64_t k = 0; k < c.P; ++k)
      for (int64_t l = k + 1; l < c.P; ++l) add(3, {k, l});
    for (int64_t k = 1; k < c.rho_mod; ++k) {
      if (k % c.M == 0) continue;
      int64_t mate = mod_reduce((uni ? -c.q : c.q) * k, c.rho_mod);
      if (k > mate) continue;
      add(4, {k});
    }
  }
  if (g.is_G()) {
    std::sort(glabels.begin(), glabels.end());
    return glabels;
  }
  std::vector<ClassLabel> out;
  std::set<ClassLabel> seen;
  for (auto& lab : glabels) {
    if (det_exp_of(c, lab.series, lab.params) != 0) continue;
    std::vector<ClassLabel> slabels;
    if (label_splits(c, lab.series)) {
      int nsplit = g.dim == 3 ? 3 : 2;
      for (int s = 0; s < nsplit; ++s) {
        ClassLabel sl = lab;
        sl.split = s;
        slabels.push_back(sl);
      }
    } else {
      slabels.push_back(lab);
    }
    for (auto& sl : slabels) {
      if (g.is_P()) {
        ClassLabel best = sl;
        if (c.splits)
          for (int64_t kp : {c.r, 2 * c.r}) {
            ClassLabel cand = shift_canonical(c, sl, kp);
            if (cand < best) best = cand;
          }
        if (seen.insert(best).second) out.push_back(best);
      } else {
        out.push_back(sl);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ClassData class_data(const GroupSpec& g, const ClassLabel& raw) {
  Ctx c = ctx_of(g);
  ClassLabel lab = canonical_label(g, raw);
  const RootTower& t = c.t;
  int64_t q = c.q, N = t.N;
  bool uni = g.sign() == Sign::unitary;
  Int qi = q;

  ClassData d;
  d.label = lab;
  const auto& p = lab.params;

  if (g.dim == 3) {
    switch (lab.series) {
      case 1: d.size = 1; break;
      case 2: d.size = Int(c.M) * c.T; break;
      case 3: d.size = qi * (q * q - 1) * c.T; break;
      case 4: d.size = qi * q * c.D; break;
      case 5: d.size = qi * q * c.M * c.T; break;
      case 6: d.size = qi * q * q * c.M * c.D; break;
      case 7: d.size = qi * q * q * c.T; break;
      case 8: d.size = qi * q * q * c.P * c.P * c.M; break;
    }
  } else {
    switch (lab.series) {
      case 1: d.size = 1; break;
      case 2: d.size = Int(q) * q - 1; break;
      case 3: d.size = qi * c.M; break;
      case 4: d.size = qi * c.P; break;
    }
  }
  if (lab.split) d.size /= (g.dim == 3 ? 3 : 2);
  if (g.is_P() && c.splits) {
    // shift-stable classes lose a factor 3 in the quotient
    if (shift_canonical(c, lab, c.r) == lab) d.size /= 3;
  }

  d.det_exp = g.is_G() ? det_exp_of(c, lab.series, lab.params) : 0;

  auto om = [&](int64_t k) { return mulm(mod_reduce(k, c.P), t.exp_omega, N); };
  if (g.dim == 3) {
    switch (lab.series) {
      case 1: d.eigens = {{om(p[0]), 3, {1, 1, 1}, true}}; break;
      case 2: d.eigens = {{om(p[0]), 3, {2, 1}, true}}; break;
      case 3: d.eigens = {{om(p[0]), 3, {3}, true}}; break;
      case 4:
        d.eigens = {{om(p[0]), 2, {1, 1}, true}, {om(p[1]), 1, {1}, true}};
        break;
      case 5:
        d.eigens = {{om(p[0]), 2, {2}, true}, {om(p[1]), 1, {1}, true}};
        break;
      case 6:
        d.eigens = {{om(p[0]), 1, {1}, true},
                    {om(p[1]), 1, {1}, true},
                    {om(p[2]), 1, {1}, true}};
        break;
      case 7: {
        int64_t mate = mod_reduce((uni ? -q : q) * p[1], c.rho_mod);
        d.eigens = {{om(p[0]), 1, {1}, true},
                    {mulm(p[1], t.exp_rho, N), 1, {1}, false},
                    {mulm(mate, t.exp_rho, N), 1, {1}, false}};
        break;
      }
      case 8: {
        int64_t q2 = (q * q) % c.T;
        int64_t k2 = mulm(p[0], q2, c.T), k4 = mulm(k2, q2, c.T);
        d.eigens = {{mulm(p[0], t.exp_theta, N), 1, {1}, false},
                    {mulm(k2, t.exp_theta, N), 1, {1}, false},
                    {mulm(k4, t.exp_theta, N), 1, {1}, false}};
        break;
      }
    }
  } else {
    switch (lab.series) {
      case 1: d.eigens = {{om(p[0]), 2, {1, 1}, true}}; break;
      case 2: d.eigens = {{om(p[0]), 2, {2}, true}}; break;
      case 3:
        d.eigens = {{om(p[0]), 1, {1}, true}, {om(p[1]), 1, {1}, true}};
        break;
      case 4: {
        int64_t mate = mod_reduce((uni ? -q : q) * p[0], c.rho_mod);
        d.eigens = {{mod_reduce(p[0], N), 1, {1}, false},
                    {mod_reduce(mate, N), 1, {1}, false}};
        break;
      }
    }
  }
  d.n = static_cast<int>(d.eigens.size());
  d.n_prime = 0;
  for (const auto& e : d.eigens)
    if (e.in_omega) ++d.n_prime;
  return d;
}

int ClassData::rank_at(int a, int dim) const {
  if (a < 0 || a >= static_cast<int>(eigens.size()))
    throw IndexOutOfRange("eigenvalue slot out of range");
  return dim - static_cast<int>(eigens[a].jordan.size());
}

ClassLabel inverse_class(const GroupSpec& g, const ClassLabel& raw) {
  Ctx c = ctx_of(g);
  ClassLabel lab = canonical_label(g, raw);
  ClassLabel inv = lab;
  for (auto& x : inv.params) x = -x;
  // square class of det[v,Nv] negates; it moves exactly when -1 is a nonsquare
  if (g.dim == 2 && inv.split && c.q % 4 == 3) inv.split = 1 - *inv.split;
  inv.params = reduce_params(c, inv.series, inv.params);
  if (g.is_P()) return canonical_label(g, inv);
  return inv;
}

ClassLabel scalar_shift(const GroupSpec& g, const ClassLabel& raw, int64_t k_prime) {
  Ctx c = ctx_of(g);
  ClassLabel lab = canonical_label(g, raw);
  int64_t kp = mod_reduce(k_prime, c.P);
  if (!g.is_G()) {
    int64_t ord = g.dim == 3 ? 3 : 2;
    if (mod_reduce(ord * kp, c.P) != 0)
      throw InvalidParams("scalar has determinant != 1");
  }
  ClassLabel out = shift_canonical(c, lab, kp);
  if (g.is_P()) return canonical_label(g, out);
  return out;
}

ClassLabel su2_to_sl2(const ClassLabel& raw, int64_t q) {
  GroupSpec su = make_group(Family::SU, 2, q);
  GroupSpec sl = make_group(Family::SL, 2, q);
  ClassLabel lab = canonical_label(su, raw);
  switch (lab.series) {
    case 1: case 2: {
      // central part maps 1 -> 1, -1 -> -1
      int64_t k = lab.params[0] == 0 ? 0 : (q - 1) / 2;
      return canonical_label(sl, {lab.series, {k}, lab.split});
    }
    case 3: {
      // omega-pair {k, -k} becomes the nonsplit-torus pair rho^{(q-1)k}
      int64_t k = lab.params[0];
      return canonical_label(sl, {4, {(q - 1) * k}, std::nullopt});
    }
    case 4: {
      // nonsplit pair rho^{(q+1)k} becomes the omega-pair {k, -k}
      int64_t j = lab.params[0];
      int64_t k = j / (q + 1);
      return canonical_label(sl, {3, {k, -k}, std::nullopt});
    }
  }
  throw InvalidParams("unreachable");
}

std::string to_string(const ClassLabel& l) {
  std::string s = "C" + std::to_string(l.series) + "[";
  for (size_t j = 0; j < l.params.size(); ++j) {
    if (j) s += ",";
    s += std::to_string(l.params[j]);
  }
  if (l.split) s += ";l=" + std::to_string(*l.split);
  s += "]";
  return s;
}

ClassLabel parse_label(const std::string& text) {
  size_t i = 0, n = text.size();
  auto skip = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto fail = [&](const std::string& why) -> void {
    throw ParseError("bad class label '" + text + "': " + why);
  };
  auto digit = [&] {
    return i < n && std::isdigit(static_cast<unsigned char>(text[i]));
  };
  auto read_int = [&]() -> int64_t {
    skip();
    bool neg = false;
    if (i < n && (text[i] == '-' || text[i] == '+')) neg = text[i++] == '-';
    if (!digit()) fail("expected an integer");
    int64_t v = 0;
    while (digit()) v = v * 10 + (text[i++] - '0');
    return neg ? -v : v;
  };
  skip();
  if (i >= n || (text[i] != 'C' && text[i] != 'c')) fail("expected 'C'");
  ++i;
  if (!digit()) fail("expected a series number");
  int series = 0;
  while (digit()) series = series * 10 + (text[i++] - '0');
  skip();
  if (i >= n || text[i] != '[') fail("expected '['");
  ++i;
  ClassLabel lab;
  lab.series = series;
  while (true) {
    lab.params.push_back(read_int());
    skip();
    if (i < n && text[i] == ',') {
      ++i;
      continue;
    }
    break;
  }
  if (i < n && text[i] == ';') {
    ++i;
    skip();
    if (i >= n || (text[i] != 'l' && text[i] != 'L')) fail("expected 'l='");
    ++i;
    skip();
    if (i >= n || text[i] != '=') fail("expected 'l='");
    ++i;
    lab.split = static_cast<int>(read_int());
    skip();
  }
  if (i >= n || text[i] != ']') fail("expected ']'");
  ++i;
  skip();
  if (i != n) fail("trailing characters");
  return lab;
}

const ClassData& Catalog::at(const ClassLabel& l) const {
  return list[static_cast<size_t>(index_of(l))];
}

int Catalog::index_of(const ClassLabel& l) const {
  auto it = index.find(l);
  if (it == index.end())
    throw InvalidParams("label " + to_string(l) + " is not a class of " +
                        to_string(spec));
  return it->second;
}

const Catalog& catalog(const GroupSpec& g) {
  static std::mutex mu;
  static std::map<GroupSpec, Catalog> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(g);
  if (it != cache.end()) return it->second;
  Catalog cat;
  cat.spec = g;
  cat.tower = root_tower(g.q.q, g.sign(), g.dim);
  for (const auto& lab : enumerate_classes(g)) {
    cat.index[lab] = static_cast<int>(cat.list.size());
    cat.list.push_back(class_data(g, lab));
  }
  return cache.emplace(g, std::move(cat)).first->second;
}

}  // namespace classprod
