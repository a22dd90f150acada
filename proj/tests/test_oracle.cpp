#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "classprod/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

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

std::set<ClassLabel> order_classes(const ExplicitGroup& g, int64_t order) {
  std::set<ClassLabel> out;
  for (int32_t c = 0; c < g.class_count(); ++c)
    if (element_order(g, g.class_reps[c]) == order) out.insert(g.labels[c]);
  return out;
}

}  // namespace

TEST_CASE("explicit builds match the catalog") {
  // finish-time asserts already compare every class size and determinant
  // exponent against class_data, so a successful build is itself the check
  struct Row {
    const char* name;
    int64_t order;
    size_t classes;
  };
  const Row rows[] = {
      {"GL3:2", 168, 6},    {"GL3:3", 11232, 24},  {"GU3:2", 648, 24},
      {"GU3:3", 24192, 56}, {"SL3:3", 5616, 12},   {"SU3:2", 216, 16},
      {"SU3:3", 6048, 14},  {"SU3:4", 62400, 22},  {"SL3:4", 60480, 28},
      {"PSL3:4", 20160, 10}, {"PSU3:2", 72, 6},
      {"GL2:2", 6, 3},      {"GL2:3", 48, 8},      {"GL2:4", 180, 15},
      {"GL2:5", 480, 24},   {"GU2:2", 18, 9},      {"GU2:3", 96, 16},
      {"GU2:4", 300, 25},   {"GU2:5", 720, 36},    {"SL2:3", 24, 7},
      {"SL2:5", 120, 9},    {"SL2:7", 336, 11},    {"SU2:3", 24, 7},
      {"SU2:5", 120, 9}};
  for (const Row& row : rows) {
    CAPTURE(row.name);
    const ExplicitGroup& g = build(parse_group(row.name));
    CHECK(int64_t(g.elements.size()) == row.order);
    CHECK(g.class_reps.size() == row.classes);
    CHECK(g.labels.size() == enumerate_classes(g.spec).size());
    int64_t total = 0;
    for (int64_t s : g.class_sizes) total += s;
    CHECK(total == row.order);
    CHECK(g.labels[g.identity_class] == L(1, {0}));
  }
  CHECK_THROWS_AS(build(parse_group("GL3:5")), CapacityExceeded);
}

TEST_CASE("element orders pin down the expected classes") {
  const ExplicitGroup& gl32 = build(parse_group("GL3:2"));
  CHECK(order_classes(gl32, 7) == std::set<ClassLabel>{L(8, {1}), L(8, {3})});

  const ExplicitGroup& su33 = build(parse_group("SU3:3"));
  CHECK(order_classes(su33, 8) == std::set<ClassLabel>{L(7, {1, 1}), L(7, {3, 3})});
  CHECK(canonical_label(su33.spec, L(7, {1, 5})) == L(7, {1, 1}));

  const ExplicitGroup& su34 = build(parse_group("SU3:4"));
  CHECK(order_classes(su34, 13) ==
        std::set<ClassLabel>{L(8, {5}), L(8, {10}), L(8, {20}), L(8, {35})});
  CHECK(canonical_label(su34.spec, L(8, {15})) == L(8, {5}));
  CHECK(canonical_label(su34.spec, L(8, {45})) == L(8, {5}));
}

TEST_CASE("n_oracle: inverses, the frozen triple, permutation and column sums") {
  const ExplicitGroup& g = build(parse_group("GL3:2"));
  for (int32_t c = 0; c < g.class_count(); ++c) {
    Int n = n_oracle(g, {g.labels[c], g.labels[g.inverse_of_class[c]]});
    CHECK(n == Int(g.class_sizes[c]));
  }
  CHECK(n_oracle(g, {L(1, {0}), L(2, {0})}) == 0);
  // frozen counts, confirmed against the character table of GL(3,2)
  CHECK(n_oracle(g, {L(7, {0, 1}), L(7, {0, 1}), L(2, {0})}) == 336);
  CHECK(n_oracle(g, {L(7, {0, 1}), L(7, {0, 1}), L(3, {0})}) == 672);

  // permutation invariance on a sample triple
  std::vector<ClassLabel> tri = {L(7, {0, 1}), L(8, {1}), L(2, {0})};
  std::sort(tri.begin(), tri.end());
  Int first = n_oracle(g, tri);
  bool all_equal = true;
  do {
    if (n_oracle(g, tri) != first) all_equal = false;
  } while (std::next_permutation(tri.begin(), tri.end()));
  CHECK(all_equal);

  // column sums: sum_c N(a, b, c) = |a| * |b|
  for (int32_t a = 0; a < g.class_count(); ++a)
    for (int32_t b = 0; b < g.class_count(); ++b) {
      Int sum = 0;
      for (int32_t c = 0; c < g.class_count(); ++c)
        sum += n_oracle_by_index(g, {a, b, c});
      CHECK(sum == Int(g.class_sizes[a]) * g.class_sizes[b]);
    }

  // m = 4 agrees with gluing two triples along a middle class
  const ExplicitGroup& u = build(parse_group("SU3:2"));
  std::vector<int32_t> quad = {2, 5, 9, 12};
  Int direct = n_oracle_by_index(u, quad);
  Int glued = 0;
  for (int32_t e = 0; e < u.class_count(); ++e) {
    Int left = n_oracle_by_index(u, {quad[0], quad[1], u.inverse_of_class[e]});
    Int right = n_oracle_by_index(u, {e, quad[2], quad[3]});
    glued += left * right / u.class_sizes[e];
  }
  CHECK(direct == glued);
}

TEST_CASE("SU(3,2^2): the order-54 normal class union controls products") {
  const ExplicitGroup& g = build(parse_group("SU3:2"));
  std::set<ClassLabel> kset = {L(1, {0}), L(1, {1}), L(1, {2}), L(2, {0}),
                               L(2, {1}), L(2, {2}), L(6, {0, 1, 2})};
  std::vector<bool> in_k(g.class_count(), false);
  int64_t ksize = 0;
  for (const ClassLabel& lab : kset) {
    int32_t c = g.class_index(lab);
    in_k[c] = true;
    ksize += g.class_sizes[c];
  }
  REQUIRE(ksize == 54);

  // K is closed under multiplication, hence a normal subgroup
  std::vector<int32_t> kelems;
  for (int32_t i = 0; i < int32_t(g.elements.size()); ++i)
    if (in_k[g.class_of[i]]) kelems.push_back(i);
  bool closed = true;
  for (int32_t x : kelems)
    for (int32_t y : kelems) {
      int32_t z = g.index.at(mat_mul(g.field, g.elements[x], g.elements[y]));
      if (!in_k[g.class_of[z]]) closed = false;
    }
  CHECK(closed);

  // each class sits inside a single K-coset; cosets form a group of order 4
  std::vector<int> coset_of_elem(g.elements.size(), -1);
  std::vector<std::vector<int32_t>> coset_reps;
  for (int32_t i = 0; i < int32_t(g.elements.size()); ++i) {
    if (coset_of_elem[i] >= 0) continue;
    int id = int(coset_reps.size());
    coset_reps.push_back({i});
    for (int32_t k : kelems)
      coset_of_elem[g.index.at(mat_mul(g.field, g.elements[i], g.elements[k]))] = id;
  }
  REQUIRE(coset_reps.size() == 4);
  std::vector<int> coset_of_class(g.class_count(), -1);
  bool single = true;
  for (int32_t i = 0; i < int32_t(g.elements.size()); ++i) {
    int32_t c = g.class_of[i];
    if (coset_of_class[c] < 0) coset_of_class[c] = coset_of_elem[i];
    if (coset_of_class[c] != coset_of_elem[i]) single = false;
  }
  CHECK(single);

  auto coset_mul = [&](int a, int b) {
    Matrix m = mat_mul(g.field, g.elements[coset_reps[a][0]], g.elements[coset_reps[b][0]]);
    return coset_of_elem[g.index.at(m)];
  };
  int trivial = coset_of_elem[g.index.at(mat_identity(3))];
  bool implication = true;
  for (int32_t a = 0; a < g.class_count(); ++a)
    for (int32_t b = 0; b < g.class_count(); ++b)
      for (int32_t c = 0; c < g.class_count(); ++c) {
        if (n_oracle_by_index(g, {a, b, c}) == 0) continue;
        if (coset_mul(coset_mul(coset_of_class[a], coset_of_class[b]), coset_of_class[c]) !=
            trivial)
          implication = false;
      }
  CHECK(implication);

  // and the compatible columns absorb the full mass |C2|^2 = 81
  int32_t c2 = g.class_index(L(2, {0}));
  Int mass = 0;
  for (int32_t c = 0; c < g.class_count(); ++c)
    if (coset_mul(coset_mul(coset_of_class[c2], coset_of_class[c2]), coset_of_class[c]) ==
        trivial)
      mass += n_oracle_by_index(g, {c2, c2, c});
  CHECK(mass == 81);
}

TEST_CASE("matrix inverses and central shifts certify the label rules") {
  for (const char* name : {"GL3:2", "GU3:3", "SU3:2", "SU3:4", "SL3:4", "SL2:3", "SL2:5",
                           "SL2:7", "GU2:3", "GU2:5", "PSU3:2", "PSL3:4"}) {
    CAPTURE(name);
    const ExplicitGroup& g = build(parse_group(name));
    for (int32_t c = 0; c < g.class_count(); ++c) {
      CHECK(g.labels[g.inverse_of_class[c]] == inverse_class(g.spec, g.labels[c]));
    }
  }

  // central shifts: multiply a representative by omega^{k'} I and match labels
  struct ShiftCase {
    const char* name;
    int64_t kp;
  };
  for (const ShiftCase& sc : {ShiftCase{"SU3:2", 1}, ShiftCase{"SL2:3", 1},
                              ShiftCase{"SL2:5", 2}, ShiftCase{"SL2:7", 3}}) {
    CAPTURE(sc.name);
    const ExplicitGroup& g = build(parse_group(sc.name));
    Matrix z = mat_identity(g.spec.dim);
    int64_t w = g.field.antilog(g.tower.exp_omega * sc.kp);
    for (int i = 0; i < g.spec.dim; ++i) z.set(i, i, int32_t(w));
    for (int32_t c = 0; c < g.class_count(); ++c) {
      Matrix shifted = mat_mul(g.field, z, g.elements[g.class_reps[c]]);
      ClassLabel got = g.labels[class_of_element(g, shifted)];
      CHECK(got == scalar_shift(g.spec, g.labels[c], sc.kp));
    }
  }
}

TEST_CASE("SU(2,q^2) is literally SL(2,q) and the dictionary matches") {
  for (int64_t q : {3, 5}) {
    CAPTURE(q);
    const ExplicitGroup& su = build(make_group(Family::SU, 2, q));
    const ExplicitGroup& sl = build(make_group(Family::SL, 2, q));
    REQUIRE(su.elements.size() == sl.elements.size());
    bool same_set = true;
    for (const Matrix& m : su.elements)
      if (!sl.index.count(m)) same_set = false;
    CHECK(same_set);
    for (int32_t c = 0; c < su.class_count(); ++c) {
      ClassLabel via_matrix = sl.labels[class_of_element(sl, su.elements[su.class_reps[c]])];
      CHECK(via_matrix == su2_to_sl2(su.labels[c], q));
    }
  }
}

TEST_CASE("labels are stable under a different form and field modulus") {
  for (const char* name : {"GU3:2", "SU3:2", "SU3:3", "GU2:3", "SL2:5"}) {
    CAPTURE(name);
    const ExplicitGroup& g0 = build(parse_group(name));
    ExplicitGroup g1 = build_uncached(parse_group(name), kOracleCapDefault, 1);
    REQUIRE(g0.class_count() == g1.class_count());
    for (int32_t c = 0; c < g0.class_count(); ++c) {
      int32_t c1 = g1.class_index(g0.labels[c]);
      CHECK(g1.class_sizes[c1] == g0.class_sizes[c]);
      CHECK(g1.labels[g1.inverse_of_class[c1]] == g0.labels[g0.inverse_of_class[c]]);
    }
    // structure constants agree label-by-label
    const auto& labs = g0.labels;
    size_t n = labs.size();
    for (size_t a = 0; a < n; a += 2)
      for (size_t b = 0; b < n; b += 3) {
        std::vector<ClassLabel> tri = {labs[a], labs[b], labs[(a + b) % n]};
        CHECK(n_oracle(g0, tri) == n_oracle(g1, tri));
      }
  }
}

TEST_CASE("check_prop_1_1 on the linear groups") {
  CHECK(check_prop_1_1(build(parse_group("GL3:2"))));
  CHECK(check_prop_1_1(build(parse_group("GL3:3"))));
  CHECK_THROWS_AS(check_prop_1_1(build(parse_group("GU3:2"))), WrongGroup);
}

TEST_CASE("cache files round-trip bit-exactly and survive corruption") {
  GroupSpec spec = parse_group("GL3:2");
  std::string path = cache_file_path(spec, 0);
  if (path.empty()) return;  // cache disabled outside the test harness

  const ExplicitGroup& g = build(spec);
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string bytes = ss.str();
  in.close();

  ExplicitGroup loaded = deserialize_group(bytes);
  CHECK(loaded.spec == g.spec);
  CHECK(loaded.elements == g.elements);
  CHECK(loaded.class_of == g.class_of);
  CHECK(loaded.class_reps == g.class_reps);
  CHECK(loaded.class_sizes == g.class_sizes);
  CHECK(loaded.labels == g.labels);
  CHECK(loaded.kappa == g.kappa);
  CHECK(serialize_group(loaded) == bytes);

  std::string bad = bytes;
  bad[bad.size() / 2] ^= char(0x5a);
  CHECK_THROWS_AS(deserialize_group(bad), Error);

  // a corrupt file on disk falls back to a fresh build and gets replaced;
  // the group must not have been built earlier in this run (registry hit
  // would skip the disk path entirely)
  GroupSpec small = parse_group("GU2:7");
  std::string spath = cache_file_path(small, 0);
  {
    std::ofstream out(spath, std::ios::binary | std::ios::trunc);
    out << "garbage";
  }
  const ExplicitGroup& h = build(small);
  CHECK(h.elements.size() == 2688);
  std::ifstream back(spath, std::ios::binary);
  std::ostringstream ss2;
  ss2 << back.rdbuf();
  CHECK(deserialize_group(ss2.str()).elements.size() == 2688);
}

TEST_CASE("projective quotients agree with the projective catalog") {
  const ExplicitGroup& psu = build(parse_group("PSU3:2"));
  std::multiset<int64_t> sizes(psu.class_sizes.begin(), psu.class_sizes.end());
  CHECK(sizes == std::multiset<int64_t>{1, 8, 9, 18, 18, 18});
  for (int32_t c = 0; c < psu.class_count(); ++c)
    CHECK(n_oracle(psu, {psu.labels[c], psu.labels[psu.inverse_of_class[c]]}) ==
          Int(psu.class_sizes[c]));

  const ExplicitGroup& psl = build(parse_group("PSL3:4"));
  CHECK(psl.elements.size() == 20160);
  CHECK(psl.class_count() == 10);
  int32_t id = psl.identity_class;
  for (int32_t c = 0; c < psl.class_count(); ++c) {
    // with the identity in front, only the inverse column is populated
    CHECK(n_oracle_by_index(psl, {id, c, psl.inverse_of_class[c]}) == Int(psl.class_sizes[c]));
    for (int32_t d = 0; d < psl.class_count(); ++d)
      if (d != psl.inverse_of_class[c]) CHECK(n_oracle_by_index(psl, {id, c, d}) == 0);
  }
}
