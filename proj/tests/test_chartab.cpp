#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "classprod/chartab.hpp"

#include <functional>
#include <vector>

#include "doctest.h"

using namespace classprod;

namespace {

ClassLabel L(int series, std::vector<int64_t> params, int split = -1) {
  ClassLabel l;
  l.series = series;
  l.params = std::move(params);
  if (split >= 0) l.split = split;
  return l;
}

// run fn over every parameter tuple of the family, values 1..range
void for_each_tuple(const CharFamilySpec& fam,
                    const std::function<void(const std::vector<int64_t>&)>& fn) {
  std::vector<int64_t> t(fam.param_ranges.size(), 1);
  for (;;) {
    fn(t);
    size_t j = 0;
    while (j < t.size()) {
      if (++t[j] <= fam.param_ranges[j]) break;
      t[j] = 1;
      ++j;
    }
    if (j == t.size()) return;
  }
}

}  // namespace

TEST_CASE("family structure, dimensions, and symmetry factors") {
  for (Sign sign : {Sign::unitary, Sign::linear}) {
    for (int64_t q : {2, 3, 5, 7}) {
      CAPTURE(int(sign));
      CAPTURE(q);
      auto fams = families(q, sign);
      REQUIRE(fams.size() == 14);
      const char* names[] = {"X1", "X2", "X3", "X4'", "X5'", "X6''", "X8'",
                             "X4", "X5", "X6'", "X7'", "X6",  "X7",  "X8"};
      for (size_t j = 0; j < 14; ++j) CHECK(fams[j].name == names[j]);

      const int64_t s = sgn(sign);
      const int64_t P = q + s, T = q * q * q + s, D = q * q - s * q + 1;
      Int dim[9];
      dim[1] = 1;
      dim[2] = Int(q) * q - s * q;
      dim[3] = Int(q) * q * q;
      dim[4] = D;
      dim[5] = Int(q) * D;
      dim[6] = (Int(q) - s) * D;
      dim[7] = T;
      dim[8] = (Int(q) + s) * (Int(q) * q - 1);

      for (const auto& f : fams) {
        CHECK(f.dim_d == dim[f.series]);
        // first-column repair: value on the center scales with the dimension
        int slot = f.level == XiLevel::xi2 ? 1 : 0;
        CHECK(f.coeff(1, slot) == f.dim_d);
        // parameter ranges by level
        std::vector<int64_t> want;
        switch (f.level) {
          case XiLevel::xi1: want = {P}; break;
          case XiLevel::xi2: want = {P, P}; break;
          case XiLevel::xi3: want = {P, P, P}; break;
          case XiLevel::xi4: want = {P, q * q - 1}; break;
          case XiLevel::xi5: want = {T}; break;
        }
        CHECK(f.param_ranges == want);
      }

      // spot anchors
      CHECK(fams[2].coeff(4) == q);                // X3 on series 4
      CHECK(fams[8].coeff(4, 1) == Int(q) - s);    // X5 slot (4,1)
      CHECK(fams[5].sym_factor == Rat(1, 3));      // X6''
      CHECK(fams[6].sym_factor == Rat(-1, 3));     // X8'
      CHECK(fams[11].sym_factor == Rat(1, 6));     // X6
      CHECK(fams[12].sym_factor == Rat(1, 2));     // X7
      CHECK(fams[13].sym_factor == Rat(1, 3));     // X8
      CHECK(fams[9].sym_factor == Rat(-1, 2));     // X6'
      CHECK(fams[10].sym_factor == Rat(-1, 2));    // X7'
    }
  }
  CHECK_THROWS_AS(families(1, Sign::linear), InvalidParams);
}

TEST_CASE("alpha sets match the evaluation index patterns") {
  const AlphaSets& a = alpha_sets();
  for (int i = 1; i <= 3; ++i) {
    CHECK(a.A6.at(i) == std::vector<std::array<int, 3>>{{1, 1, 1}});
    CHECK(a.A7.at(i) == std::vector<std::array<int, 2>>{{1, 1}});
  }
  for (int i = 4; i <= 5; ++i) {
    CHECK(a.A6.at(i) ==
          std::vector<std::array<int, 3>>{{2, 1, 1}, {1, 2, 1}, {1, 1, 2}});
    CHECK(a.A7.at(i) == std::vector<std::array<int, 2>>{{2, 1}});
  }
  CHECK(a.A6.at(6).size() == 6);
  CHECK(a.A7.at(6).empty());
  CHECK(a.A6.at(7).empty());
  CHECK(a.A7.at(7) == std::vector<std::array<int, 2>>{{1, 2}, {1, 3}});
  CHECK(a.A6.at(8).empty());
  CHECK(a.A7.at(8).empty());
}

TEST_CASE("values at the identity equal the family dimension") {
  for (Sign sign : {Sign::unitary, Sign::linear}) {
    for (int64_t q : {2, 3, 4, 5, 7}) {
      GroupSpec g = make_group(sign == Sign::unitary ? Family::GU : Family::GL, 3, q);
      const Catalog& cat = catalog(g);
      ClassData id = cat.at(L(1, {0}));
      for (const auto& f : families(q, sign)) {
        std::vector<int64_t> params(f.param_ranges.size(), 1);
        CycSum v = char_value(f, params, id, cat.tower);
        CHECK(v == CycSum::root(cat.tower.N, 0, f.dim_d));
      }
    }
  }
}

TEST_CASE("vanishing and explicit values on specific classes") {
  GroupSpec g = make_group(Family::GU, 3, 3);
  const Catalog& cat = catalog(g);
  auto fams = families(3, Sign::unitary);
  const CharFamilySpec& x1 = fams[0];
  const CharFamilySpec& x6 = fams[11];
  const CharFamilySpec& x7 = fams[12];
  const CharFamilySpec& x8 = fams[13];

  // X6 vanishes on C7 and C8 classes
  CHECK(char_value(x6, {1, 2, 3}, cat.at(L(7, {1, 1})), cat.tower).is_zero());
  CHECK(char_value(x6, {2, 2, 1}, cat.at(L(8, {1})), cat.tower).is_zero());
  // X7 vanishes on C6 and C8
  CHECK(char_value(x7, {1, 2}, cat.at(L(6, {0, 1, 2})), cat.tower).is_zero());
  CHECK(char_value(x7, {1, 2}, cat.at(L(8, {1})), cat.tower).is_zero());

  // X8^{(t)} on C8^{(k)} = -+ (zeta^{tk} + zeta^{tkq^2} + zeta^{tkq^4})
  const int64_t N = cat.tower.N, et = cat.tower.exp_theta;
  const int64_t k = 1, t = 2, q2 = 9, q4 = 81;
  CycSum want = CycSum::zero(N);
  want.add_term(mod_reduce(et * k * t, N), -1);
  want.add_term(mod_reduce(et * k * q2 * t, N), -1);
  want.add_term(mod_reduce(et * k * q4 * t, N), -1);
  CHECK(char_value(x8, {t}, cat.at(L(8, {k})), cat.tower) == want);

  // trivial character X1^{(t)} is the constant 1 on determinant-1 classes
  ClassData c = cat.at(L(4, {1, 2}));  // det exponent (2k+l) = 4 = 0 mod P
  for (int64_t tt : {1, 2, 3})
    CHECK(char_value(x1, {tt}, c, cat.tower) == CycSum::root(N, 0, 1));
}

TEST_CASE("degree sums reproduce the group order through the family weights") {
  struct Case {
    Sign sign;
    int64_t q;
    Family fam;
  };
  for (const Case& c : {Case{Sign::unitary, 2, Family::GU}, Case{Sign::unitary, 3, Family::GU},
                        Case{Sign::linear, 2, Family::GL}, Case{Sign::linear, 3, Family::GL}}) {
    CAPTURE(c.q);
    GroupSpec g = make_group(c.fam, 3, c.q);
    const Catalog& cat = catalog(g);
    ClassData id = cat.at(L(1, {0}));
    Rat total = 0;
    for (const auto& f : families(c.q, c.sign)) {
      Rat block = 0;
      for_each_tuple(f, [&](const std::vector<int64_t>& params) {
        Rat v = cyc_rational(char_value(f, params, id, cat.tower));
        block += v * v;
      });
      total += f.sym_factor * block;
    }
    CHECK(total == Rat(group_order(g)));
  }
}

TEST_CASE("second orthogonality across all class pairs at q=2 unitary") {
  GroupSpec g = make_group(Family::GU, 3, 2);
  const Catalog& cat = catalog(g);
  auto fams = families(2, Sign::unitary);

  // per class, all character values with 6*s(X)-integer weights baked in
  std::vector<CycSum> acc;  // one weighted row-sum of |chi(A)|^2 terms per pair
  std::vector<std::vector<std::vector<CycSum>>> vals;  // [class][family][tuple]
  for (const ClassData& cd : cat.list) {
    std::vector<std::vector<CycSum>> per;
    for (const auto& f : fams) {
      std::vector<CycSum> tup;
      for_each_tuple(f, [&](const std::vector<int64_t>& params) {
        tup.push_back(char_value(f, params, cd, cat.tower));
      });
      per.push_back(std::move(tup));
    }
    vals.push_back(std::move(per));
  }

  Int order = group_order(g);
  for (size_t a = 0; a < cat.list.size(); ++a)
    for (size_t b = 0; b < cat.list.size(); ++b) {
      CycSum sum = CycSum::zero(cat.tower.N);
      for (size_t fi = 0; fi < fams.size(); ++fi) {
        Rat w6 = fams[fi].sym_factor * 6;
        Int w = rat_to_int(w6, "six times symmetry factor");
        for (size_t ti = 0; ti < vals[a][fi].size(); ++ti)
          sum += cyc_mul(vals[a][fi][ti], vals[b][fi][ti].conjugate()).scaled(w);
      }
      Rat got = cyc_rational(sum) / 6;
      Rat want = a == b ? Rat(order) / Rat(cat.list[a].size) : Rat(0);
      CHECK(got == want);
    }
}

TEST_CASE("restriction data for the split cases") {
  // unitary q = 3r - 1
  SRestriction u5 = s_restriction(5, Sign::unitary);
  CHECK(u5.r == 2);
  CHECK(u5.P == 6);
  CHECK(u5.split6_value(1, 1) == 3);
  CHECK(u5.split6_value(0, 1) == -2);
  CHECK(u5.dim6_third == 28);
  CHECK(u5.dim8_third == 48);
  CHECK(u5.d6_params() == std::array<int64_t, 3>{0, 2, 4});
  CHECK(u5.d8_param(1) == 7);
  CHECK(u5.d8_param(2) == 14);
  CHECK(u5.split8_eps_exp(2, 4) == 2);  // 8 mod 6

  // linear q = 3r + 1
  SRestriction l4 = s_restriction(4, Sign::linear);
  CHECK(l4.r == 1);
  CHECK(l4.D == 21);
  CHECK(l4.dim6_third == 35);
  CHECK(l4.dim8_third == 15);

  SRestriction u2 = s_restriction(2, Sign::unitary);
  CHECK(u2.dim6_third == 1);
  CHECK(u2.dim8_third == 3);

  SRestriction u8 = s_restriction(8, Sign::unitary);
  CHECK(u8.r == 3);
  CHECK(u8.dim6_third == 133);
  CHECK(u8.dim8_third == 189);

  // the three split values sum to q - 3r = -+1 on every label
  for (const SRestriction& sr : {u5, l4, u2, u8}) {
    for (int64_t l = 0; l < 3; ++l) {
      int64_t sum = 0;
      for (int64_t t = 0; t < 3; ++t) sum += sr.split6_value(t, l);
      CHECK(sum == -sgn(sr.sign));
    }
  }

  CHECK_THROWS_AS(s_restriction(3, Sign::unitary), NotSplitCase);
  CHECK_THROWS_AS(s_restriction(3, Sign::linear), NotSplitCase);
  CHECK_THROWS_AS(s_restriction(4, Sign::unitary), NotSplitCase);
  CHECK_THROWS_AS(s_restriction(5, Sign::linear), NotSplitCase);
}

TEST_CASE("short-orbit parents take the predicted values on C3 classes") {
  struct Case {
    Sign sign;
    int64_t q;
    Family fam;
  };
  for (const Case& c : {Case{Sign::unitary, 2, Family::GU}, Case{Sign::unitary, 5, Family::GU},
                        Case{Sign::unitary, 8, Family::GU}, Case{Sign::linear, 4, Family::GL},
                        Case{Sign::linear, 7, Family::GL}}) {
    CAPTURE(c.q);
    CAPTURE(int(c.sign));
    GroupSpec g = make_group(c.fam, 3, c.q);
    const Catalog& cat = catalog(g);
    SRestriction sr = s_restriction(c.q, c.sign);
    auto fams = families(c.q, c.sign);
    const CharFamilySpec& x6 = fams[11];
    const CharFamilySpec& x8 = fams[13];
    const Int ms = -sgn(c.sign);
    const int64_t N = cat.tower.N;

    for (int64_t k : {int64_t(0), sr.r, 2 * sr.r}) {
      ClassData cd = cat.at(L(3, {k}));
      // chi_{d6}^{(0,r,2r)} = -+1 on every det-1 C3 class
      auto p6 = sr.d6_params();
      CHECK(char_value(x6, {p6[0], p6[1], p6[2]}, cd, cat.tower) ==
            CycSum::root(N, 0, ms));
      // chi_{d8}^{(uD/3)} = -+ eps^{uk}
      for (int64_t u : {1, 2}) {
        int64_t e = mod_reduce(cat.tower.exp_omega * sr.split8_eps_exp(u, k), N);
        CHECK(char_value(x8, {sr.d8_param(u)}, cd, cat.tower) == CycSum::root(N, e, ms));
      }
    }
    // consistency of the split dimension bookkeeping
    CHECK(sr.dim6_third * 3 == x6.dim_d);
    CHECK(sr.dim8_third * 3 == x8.dim_d);
  }
}
