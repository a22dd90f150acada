#include "classprod/chartab.hpp"

namespace classprod {

namespace {

// one row of Table 3.1 (single coefficient per class series)
void row_single(CharFamilySpec& f, std::array<Int, 9> c) {
  for (int i = 1; i <= 8; ++i) f.coeff_row[{i, 0}] = std::move(c[i]);
}

}  // namespace

Int CharFamilySpec::coeff(int cls_series, int slot) const {
  auto it = coeff_row.find({cls_series, slot});
  return it == coeff_row.end() ? Int(0) : it->second;
}

const AlphaSets& alpha_sets() {
  static const AlphaSets sets = [] {
    AlphaSets a;
    for (int i = 1; i <= 3; ++i) {
      a.A6[i] = {{1, 1, 1}};
      a.A7[i] = {{1, 1}};
    }
    for (int i = 4; i <= 5; ++i) {
      a.A6[i] = {{2, 1, 1}, {1, 2, 1}, {1, 1, 2}};
      a.A7[i] = {{2, 1}};
    }
    a.A6[6] = {{1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1}};
    a.A7[6] = {};
    a.A6[7] = {};
    a.A7[7] = {{1, 2}, {1, 3}};
    a.A6[8] = {};
    a.A7[8] = {};
    return a;
  }();
  return sets;
}

std::vector<CharFamilySpec> families(int64_t q, Sign sign) {
  if (q < 2) throw InvalidParams("families: q must be at least 2");
  const Int s = sgn(sign);  // upper sign of every table entry is the unitary one
  const int64_t P = q_pm1(q, sign);
  const int64_t q2m1 = q * q - 1;
  const int64_t T = q3_pm1(q, sign);

  std::array<Int, 9> d;
  d[1] = 1;
  d[2] = Int(q) * q - s * q;
  d[3] = Int(q) * q * q;
  d[4] = q2_mp_q_p1(q, sign);
  d[5] = Int(q) * d[4];
  d[6] = (Int(q) - s) * d[4];
  d[7] = T;
  d[8] = (Int(q) + s) * q2m1;

  auto base = [&](const char* name, XiLevel level, int series, Rat sym,
                  std::vector<int64_t> ranges) {
    CharFamilySpec f;
    f.name = name;
    f.level = level;
    f.series = series;
    f.dim_d = d[size_t(series)];
    f.sym_factor = std::move(sym);
    f.param_ranges = std::move(ranges);
    return f;
  };

  std::vector<CharFamilySpec> out;

  // ---- Xi1: value c_i f(det A)^t, t running over [P] ----
  {
    CharFamilySpec f = base("X1", XiLevel::xi1, 1, 1, {P});
    row_single(f, {0, 1, 1, 1, 1, 1, 1, 1, 1});
    out.push_back(std::move(f));
  }
  {
    CharFamilySpec f = base("X2", XiLevel::xi1, 2, 1, {P});
    row_single(f, {0, d[2], -s * q, 0, 1 - s * q, 1, 2, 0, -1});
    out.push_back(std::move(f));
  }
  {
    CharFamilySpec f = base("X3", XiLevel::xi1, 3, 1, {P});
    row_single(f, {0, d[3], 0, 0, q, 0, -s, s, -s});
    out.push_back(std::move(f));
  }
  {
    CharFamilySpec f = base("X4'", XiLevel::xi1, 4, -1, {P});
    row_single(f, {0, d[4], 1 - s * q, 1, 2 - s * q, 2, 3, 1, 0});
    out.push_back(std::move(f));
  }
  {
    CharFamilySpec f = base("X5'", XiLevel::xi1, 5, -1, {P});
    // c5 entry is -s, not a constant -1: the row must equal the diagonal
    // (t = u) of the X5 block, whose C5 value is c_{5,1} + c_{5,2} = -s.
    row_single(f, {0, d[5], q, 0, 2 * q - s, -s, -3 * s, s, 0});
    out.push_back(std::move(f));
  }
  {
    CharFamilySpec f = base("X6''", XiLevel::xi1, 6, Rat(1, 3), {P});
    row_single(f, {0, d[6], 2 * q - s, -s, 3 * q - 3 * s, -3 * s, -6 * s, 0, 0});
    out.push_back(std::move(f));
  }
  {
    CharFamilySpec f = base("X8'", XiLevel::xi1, 8, Rat(-1, 3), {P});
    row_single(f, {0, d[8], -q - s, -s, 0, 0, 0, 0, -3 * s});
    out.push_back(std::move(f));
  }

  // ---- Xi2: value sum_a c_{i,a} f(lambda_a)^t f(lambda_a^{-1} det A)^u,
  //      (t,u) running over [P]^2 ----
  auto row_slotted = [&](CharFamilySpec& f, Int c1, Int c2, Int c3, Int c41, Int c42,
                         Int c51, Int c52, Int c6a, Int c7) {
    f.coeff_row[{1, 1}] = std::move(c1);
    f.coeff_row[{2, 1}] = std::move(c2);
    f.coeff_row[{3, 1}] = std::move(c3);
    f.coeff_row[{4, 1}] = std::move(c41);
    f.coeff_row[{4, 2}] = std::move(c42);
    f.coeff_row[{5, 1}] = std::move(c51);
    f.coeff_row[{5, 2}] = std::move(c52);
    for (int a = 1; a <= 3; ++a) f.coeff_row[{6, a}] = c6a;
    f.coeff_row[{7, 1}] = std::move(c7);
    // series 8 has no Omega eigenvalues: empty sum
  };
  {
    CharFamilySpec f = base("X4", XiLevel::xi2, 4, 1, {P, P});
    row_slotted(f, d[4], 1 - s * q, 1, 1 - s * q, 1, 1, 1, 1, 1);
    out.push_back(std::move(f));
  }
  {
    CharFamilySpec f = base("X5", XiLevel::xi2, 5, 1, {P, P});
    row_slotted(f, d[5], q, 0, q - s, q, -s, 0, -s, s);
    out.push_back(std::move(f));
  }
  {
    CharFamilySpec f = base("X6'", XiLevel::xi2, 6, Rat(-1, 2), {P, P});
    row_slotted(f, d[6], 2 * q - s, -s, 2 * (q - s), q - s, -2 * s, -s, -2 * s, 0);
    out.push_back(std::move(f));
  }
  {
    CharFamilySpec f = base("X7'", XiLevel::xi2, 7, Rat(-1, 2), {P, P});
    row_slotted(f, d[7], s, s, 0, q + s, 0, s, 0, 2 * s);
    out.push_back(std::move(f));
  }

  // ---- Xi3: X6, (t,u,v) over [P]^3, indices from A6 ----
  {
    CharFamilySpec f = base("X6", XiLevel::xi3, 6, Rat(1, 6), {P, P, P});
    row_single(f, {0, d[6], 2 * q - s, -s, q - s, -s, -s, 0, 0});
    out.push_back(std::move(f));
  }

  // ---- Xi4: X7, (t,u) over [P] x [q^2-1], indices from A7 ----
  {
    CharFamilySpec f = base("X7", XiLevel::xi4, 7, Rat(1, 2), {P, q2m1});
    row_single(f, {0, d[7], s, s, q + s, s, 0, s, 0});
    out.push_back(std::move(f));
  }

  // ---- Xi5: X8, t over [q^3 +- 1], all eigenvalues ----
  {
    CharFamilySpec f = base("X8", XiLevel::xi5, 8, Rat(1, 3), {T});
    row_single(f, {0, d[8], -q - s, -s, 0, 0, 0, 0, -s});
    out.push_back(std::move(f));
  }

  return out;
}

CycSum char_value(const CharFamilySpec& fam, const std::vector<int64_t>& params,
                  const ClassData& cls, const RootTower& tower) {
  if (params.size() != fam.param_ranges.size())
    throw InvalidParams("char_value: parameter count mismatch for family " + fam.name);
  const int i = cls.series();
  const int64_t N = tower.N;
  CycSum v = CycSum::zero(N);

  auto eig = [&](int slot) { return mod_reduce(cls.eigens[size_t(slot - 1)].tau_exp, N); };
  auto red = [&](int64_t x) { return mod_reduce(x, N); };

  switch (fam.level) {
    case XiLevel::xi1: {
      Int c = fam.coeff(i);
      if (c != 0) v.add_term(red(red(cls.det_exp) * red(params[0])), c);
      break;
    }
    case XiLevel::xi2: {
      int64_t t = red(params[0]), u = red(params[1]);
      for (int a = 1; a <= cls.n_prime; ++a) {
        Int c = fam.coeff(i, a);
        if (c == 0) continue;
        int64_t e = eig(a);
        v.add_term(red(red(e * t) + red(red(cls.det_exp - e + N) * u)), c);
      }
      break;
    }
    case XiLevel::xi3: {
      Int c = fam.coeff(i);
      if (c == 0) break;
      for (const auto& al : alpha_sets().A6.at(i)) {
        int64_t ex = 0;
        for (int j = 0; j < 3; ++j) ex = red(ex + red(eig(al[size_t(j)]) * red(params[size_t(j)])));
        v.add_term(ex, c);
      }
      break;
    }
    case XiLevel::xi4: {
      Int c = fam.coeff(i);
      if (c == 0) break;
      for (const auto& al : alpha_sets().A7.at(i)) {
        int64_t ex = red(red(eig(al[0]) * red(params[0])) + red(eig(al[1]) * red(params[1])));
        v.add_term(ex, c);
      }
      break;
    }
    case XiLevel::xi5: {
      Int c = fam.coeff(i);
      if (c == 0) break;
      for (int a = 1; a <= cls.n; ++a) v.add_term(red(eig(a) * red(params[0])), c);
      break;
    }
  }
  return v;
}

SRestriction s_restriction(int64_t q, Sign sign) {
  const int64_t P = q_pm1(q, sign);
  if (P % 3 != 0)
    throw NotSplitCase("s_restriction: 3 does not divide " + std::to_string(P));
  SRestriction sr;
  sr.q = q;
  sr.sign = sign;
  sr.P = P;
  sr.r = P / 3;
  sr.D = q2_mp_q_p1(q, sign);
  const Int s = sgn(sign);
  sr.dim6_third = (Int(q) - s) * sr.D / 3;
  sr.dim8_third = (Int(q) + s) * (Int(q) * q - 1) / 3;
  return sr;
}

}  // namespace classprod
