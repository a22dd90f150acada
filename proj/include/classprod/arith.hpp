#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace classprod {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPrime : Error { using Error::Error; };
struct CapacityExceeded : Error { using Error::Error; };
struct ZeroElement : Error { using Error::Error; };
struct ModulusMismatch : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct WrongGroup : Error { using Error::Error; };
struct TupleTooLong : Error { using Error::Error; };
struct IntegralityViolation : Error { using Error::Error; };
struct CrossCheckFailure : Error { using Error::Error; };
struct LabelMismatch : Error { using Error::Error; };
struct ClosureSizeMismatch : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct NotSplitCase : Error { using Error::Error; };
struct NoClosedForm : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// ---- elementary number theory (desk scale, trial division) ----

int64_t mod_reduce(int64_t x, int64_t m);  // representative in [0, m)
int64_t modpow64(int64_t base, int64_t exp, int64_t mod);
bool is_prime(int64_t n);
std::vector<std::pair<int64_t, int>> factorize(int64_t n);
std::vector<int64_t> prime_divisors(int64_t n);
int mobius(int64_t n);
int64_t euler_phi(int64_t n);

Int int_pow(Int base, int exp);

struct PrimePowerQ {
  int64_t p = 0;
  int e = 0;
  int64_t q = 0;
  auto operator<=>(const PrimePowerQ&) const = default;
};

PrimePowerQ make_prime_power(int64_t p, int e);  // NotPrime if p composite
PrimePowerQ parse_prime_power(int64_t q);        // NotPrime if q is not a prime power

// ---- sign convention: the upper sign of every paper expression is the
// unitary one, the lower sign the linear one ----

enum class Sign { unitary, linear };

inline int sgn(Sign s) { return s == Sign::unitary ? +1 : -1; }
// q +- 1 (upper sign unitary): |Omega| = order of omega
inline int64_t q_pm1(int64_t q, Sign s) { return s == Sign::unitary ? q + 1 : q - 1; }
// q -+ 1 (upper sign unitary)
inline int64_t q_mp1(int64_t q, Sign s) { return s == Sign::unitary ? q - 1 : q + 1; }
// q^2 -+ q + 1
inline int64_t q2_mp_q_p1(int64_t q, Sign s) { return q * q - sgn(s) * q + 1; }
// q^2 +- q - 1
inline int64_t q2_pm_q_m1(int64_t q, Sign s) { return q * q + sgn(s) * q - 1; }
// q^3 +- 1
inline int64_t q3_pm1(int64_t q, Sign s) { return q * q * q + sgn(s); }
// q^3 -+ 1
inline int64_t q3_mp1(int64_t q, Sign s) { return q * q * q - sgn(s); }
// delta_L of the closed forms: 0 unitary, 1 linear
inline int64_t delta_L(Sign s) { return s == Sign::unitary ? 0 : 1; }

// ---- finite field with discrete-log tables ----
//
// Elements are integers in [0, Q) whose base-p digits are the coefficients of
// the residue polynomial (digit i = coefficient of x^i).  The modulus is the
// monic irreducible of degree e*d over the prime field that is smallest when
// its coefficient sequence is read as a base-p integer; the generator is the
// smallest element index of multiplicative order Q-1.

struct FieldCtx {
  PrimePowerQ base;            // F_{base.q} is the nominal ground field
  int d = 0;                   // extension degree over the ground field
  int64_t p = 0;               // characteristic
  int n = 0;                   // total degree over the prime field (= base.e * d)
  int64_t Q = 0;               // p^n
  std::vector<int> modulus;    // coefficients c_0..c_n of the modulus, c_n = 1
  int64_t generator = 0;
  std::vector<int32_t> log_table;  // index -> dlog, -1 at 0
  std::vector<int32_t> antilog_table;  // exponent in [0, Q-1) -> index

  int64_t add(int64_t a, int64_t b) const;
  int64_t neg(int64_t a) const;
  int64_t sub(int64_t a, int64_t b) const;
  int64_t mul(int64_t a, int64_t b) const;
  int64_t inv(int64_t a) const;
  int64_t pow_elt(int64_t a, int64_t k) const;  // a != 0 or k > 0
  int64_t dlog(int64_t x) const;                // ZeroElement on 0
  int64_t antilog(int64_t k) const;             // k arbitrary, reduced mod Q-1
  int64_t from_int(int64_t c) const;            // image of an integer (prime field)
  int64_t frobenius(int64_t a, int64_t power) const;  // a^(power), power = p^j typically
};

inline constexpr int64_t kFieldCapDefault = int64_t(1) << 24;

// modulus_skip > 0 selects the (skip+1)-th irreducible modulus instead of the
// first one; everything downstream of the tables changes numerically while
// the abstract field stays the same.
FieldCtx make_field(int64_t p, int e, int d, int64_t cap = kFieldCapDefault, int modulus_skip = 0);

// ---- generator tower ----
//
// tau generates F_{q^6}^* (dim 3) or F_{q^2}^* (dim 2); the named roots are
// powers of tau.  dim 3: rho = tau^(q^4+q^2+1) of order q^2-1, omega =
// rho^(q-+1) of order q+-1, theta = tau^(q^3-+1) of order q^3+-1.  dim 2:
// rho = tau, omega = rho^(q-+1), sigma = rho^(q+1) of order q-1.

struct RootTower {
  int64_t q = 0;
  Sign sign = Sign::unitary;
  int dim = 0;
  int64_t N = 0;  // q^6-1 or q^2-1
  int64_t exp_tau = 1;
  int64_t exp_rho = 0;
  int64_t exp_omega = 0;
  int64_t exp_theta = 0;  // dim 3 only
  int64_t exp_sigma = 0;  // dim 2 only
};

RootTower root_tower(int64_t q, Sign sign, int dim);

// multiplicative order of tau^e in a cyclic group of order N
inline int64_t tower_order(int64_t N, int64_t e) { return N / std::gcd(N, mod_reduce(e, N)); }

// ---- exact formal sums of N-th roots of unity ----

struct CycSum {
  int64_t N = 1;
  std::map<int64_t, Int> coeffs;  // exponent in [0,N) -> nonzero coefficient

  static CycSum zero(int64_t N) { return CycSum{N, {}}; }
  static CycSum root(int64_t N, int64_t e, Int c = 1);

  void add_term(int64_t e, const Int& c);
  bool is_zero() const { return coeffs.empty(); }

  CycSum operator+(const CycSum& o) const;
  CycSum operator-(const CycSum& o) const;
  CycSum& operator+=(const CycSum& o);
  CycSum scaled(const Int& c) const;
  CycSum conjugate() const;  // e -> -e mod N
  bool operator==(const CycSum& o) const { return N == o.N && coeffs == o.coeffs; }
};

CycSum cyc_mul(const CycSum& a, const CycSum& b);

// Rational part by the Moebius trace: (1/phi(N)) sum_e c_e Tr(zeta_N^e),
// Tr(zeta_N^e) = mu(N/g) phi(N) / phi(N/g) with g = gcd(e, N).  Exact for
// rational-valued sums; an unspecified rational otherwise.
Rat cyc_rational(const CycSum& v);

// guard: engines assert their rationals are integers before converting
Int rat_to_int(const Rat& r, const char* what);

}  // namespace classprod
