#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "classprod/arith.hpp"

using namespace classprod;

TEST_CASE("prime powers") {
  CHECK(make_prime_power(2, 1).q == 2);
  CHECK(make_prime_power(3, 2).q == 9);
  CHECK_THROWS_AS(make_prime_power(4, 1), NotPrime);
  auto pp = parse_prime_power(8);
  CHECK(pp.p == 2);
  CHECK(pp.e == 3);
  CHECK_THROWS_AS(parse_prime_power(6), NotPrime);
  CHECK_THROWS_AS(parse_prime_power(1), NotPrime);
}

TEST_CASE("number theory helpers") {
  CHECK(mobius(1) == 1);
  CHECK(mobius(6) == 1);
  CHECK(mobius(30) == -1);
  CHECK(mobius(12) == 0);
  CHECK(euler_phi(1) == 1);
  CHECK(euler_phi(63) == 36);
  CHECK(euler_phi(728) == 288);
  CHECK(is_prime(2));
  CHECK(is_prime(13));
  CHECK(!is_prime(1));
  CHECK(!is_prime(91));
  CHECK(int_pow(3, 4) == 81);
}

TEST_CASE("make_field F_64") {
  auto ctx = make_field(2, 1, 6);
  CHECK(ctx.Q == 64);
  // x^6 + x + 1 is the first irreducible in coefficient order
  CHECK(ctx.modulus == std::vector<int>{1, 1, 0, 0, 0, 0, 1});
  CHECK(ctx.dlog(ctx.generator) == 1);
  CHECK(ctx.dlog(1) == 0);
  // multiplicative order is 63
  CHECK(ctx.pow_elt(ctx.generator, 63) == 1);
  for (int64_t k : {7, 9, 21, 3})
    CHECK(ctx.pow_elt(ctx.generator, k) != 1);
  // homomorphism: dlog(xy) = dlog(x)+dlog(y) mod 63
  int64_t a = ctx.antilog(17), b = ctx.antilog(40);
  CHECK(ctx.dlog(ctx.mul(a, b)) == (17 + 40) % 63);
  CHECK(ctx.mul(ctx.antilog(2), ctx.antilog(3)) == ctx.antilog(5));
}

TEST_CASE("make_field F_9 and errors") {
  auto f9 = make_field(3, 1, 2);
  CHECK(f9.Q == 9);
  CHECK(f9.dlog(f9.generator) == 1);
  CHECK(f9.pow_elt(f9.generator, 8) == 1);
  CHECK(f9.pow_elt(f9.generator, 4) != 1);
  CHECK_THROWS_AS(make_field(4, 1, 1), NotPrime);
  CHECK_THROWS_AS(make_field(2, 1, 30), CapacityExceeded);
  CHECK_THROWS_AS(f9.dlog(0), ZeroElement);

  // field axioms sampled: distributivity in F_9
  for (int64_t a = 0; a < 9; ++a)
    for (int64_t b = 0; b < 9; ++b) {
      int64_t c = (a * 5 + b * 2 + 1) % 9;
      CHECK(f9.mul(f9.add(a, b), c) == f9.add(f9.mul(a, c), f9.mul(b, c)));
    }

  // base field with nontrivial e: F_{9^2} = F_81 built over (p,e,d) = (3,2,2)
  auto f81 = make_field(3, 2, 2);
  CHECK(f81.Q == 81);
  CHECK(f81.n == 4);
  CHECK(f81.pow_elt(f81.generator, 80) == 1);
}

TEST_CASE("root_tower dim-3 values") {
  auto u2 = root_tower(2, Sign::unitary, 3);
  CHECK(u2.N == 63);
  CHECK(u2.exp_rho == 21);
  CHECK(u2.exp_omega == 21);
  CHECK(u2.exp_theta == 7);
  auto l3 = root_tower(3, Sign::linear, 3);
  CHECK(l3.N == 728);
  CHECK(l3.exp_rho == 91);
  CHECK(l3.exp_omega == 364);
  CHECK(tower_order(l3.N, l3.exp_omega) == 2);
  CHECK(l3.exp_theta == 28);
  CHECK(tower_order(l3.N, l3.exp_theta) == 26);
  auto u32 = root_tower(3, Sign::unitary, 2);
  CHECK(u32.N == 8);
  CHECK(u32.exp_rho == 1);
  CHECK(u32.exp_omega == 2);
  CHECK(tower_order(u32.N, u32.exp_omega) == 4);
}

TEST_CASE("root_tower order invariants for q <= 16") {
  for (int64_t q : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16}) {
    for (Sign s : {Sign::unitary, Sign::linear}) {
      auto t3 = root_tower(q, s, 3);
      CHECK(tower_order(t3.N, t3.exp_rho) == q * q - 1);
      CHECK(tower_order(t3.N, t3.exp_omega) == q_pm1(q, s));
      CHECK(tower_order(t3.N, t3.exp_theta) == q3_pm1(q, s));
      auto t2 = root_tower(q, s, 2);
      CHECK(tower_order(t2.N, t2.exp_omega) == q_pm1(q, s));
      CHECK(tower_order(t2.N, t2.exp_sigma) == q - 1);
    }
  }
}

TEST_CASE("CycSum algebra") {
  auto z1 = CycSum::root(63, 1);
  auto zN1 = CycSum::root(63, 62);
  auto p = cyc_mul(z1, zN1);
  CHECK(p.coeffs.size() == 1);
  CHECK(p.coeffs.at(0) == 1);

  auto one_plus = CycSum::root(63, 0) + CycSum::root(63, 1);
  CHECK(cyc_mul(one_plus, CycSum::zero(63)).is_zero());

  auto s = CycSum::root(63, 2) + CycSum::root(63, 3);
  auto shifted = cyc_mul(s, CycSum::root(63, 4));
  CHECK(shifted == CycSum::root(63, 6) + CycSum::root(63, 7));

  CHECK_THROWS_AS(cyc_mul(CycSum::root(5, 1), CycSum::root(7, 1)), ModulusMismatch);

  // cancellation keeps the map sparse
  auto c = CycSum::root(9, 4) - CycSum::root(9, 4);
  CHECK(c.is_zero());
}

TEST_CASE("cyc_rational") {
  CycSum full3 = CycSum::root(3, 0) + CycSum::root(3, 1) + CycSum::root(3, 2);
  CHECK(cyc_rational(full3) == 0);

  CHECK(cyc_rational(CycSum::root(12, 0, 2)) == 2);

  CycSum s5 = CycSum::zero(5);
  for (int64_t e = 1; e <= 4; ++e) s5 += CycSum::root(5, e);
  CHECK(cyc_rational(s5) == -1);

  // multiplicative on rational-valued sums: (-1)*(-1) = 1
  CHECK(cyc_rational(cyc_mul(s5, s5)) == 1);

  // Galois-orbit sums are integers: units mod 12 at modulus 12
  CycSum orb = CycSum::zero(12);
  for (int64_t u : {1, 5, 7, 11}) orb += CycSum::root(12, u);
  Rat r = cyc_rational(orb);
  CHECK(boost::multiprecision::denominator(r) == 1);

  CHECK_THROWS_AS(rat_to_int(Rat(1, 2), "test"), IntegralityViolation);
  CHECK(rat_to_int(Rat(6, 2), "test") == 3);
}
