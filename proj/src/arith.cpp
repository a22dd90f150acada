#include "classprod/arith.hpp"

#include <algorithm>
#include <numeric>

namespace classprod {

int64_t mod_reduce(int64_t x, int64_t m) {
  int64_t r = x % m;
  return r < 0 ? r + m : r;
}

int64_t modpow64(int64_t base, int64_t exp, int64_t mod) {
  // mod <= 2^24-ish in practice; __int128 keeps products exact for mod < 2^62
  unsigned __int128 acc = 1, b = mod_reduce(base, mod);
  while (exp > 0) {
    if (exp & 1) acc = acc * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return int64_t(acc);
}

bool is_prime(int64_t n) {
  if (n < 2) return false;
  for (int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::pair<int64_t, int>> factorize(int64_t n) {
  std::vector<std::pair<int64_t, int>> out;
  for (int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      int e = 0;
      while (n % d == 0) n /= d, ++e;
      out.push_back({d, e});
    }
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

std::vector<int64_t> prime_divisors(int64_t n) {
  std::vector<int64_t> out;
  for (auto& [p, e] : factorize(n)) out.push_back(p);
  return out;
}

int mobius(int64_t n) {
  int m = 1;
  for (auto& [p, e] : factorize(n)) {
    if (e > 1) return 0;
    m = -m;
  }
  return m;
}

int64_t euler_phi(int64_t n) {
  int64_t phi = n;
  for (auto& [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

Int int_pow(Int base, int exp) {
  Int acc = 1;
  while (exp-- > 0) acc *= base;
  return acc;
}

PrimePowerQ make_prime_power(int64_t p, int e) {
  if (!is_prime(p)) throw NotPrime("not a prime: " + std::to_string(p));
  if (e < 1) throw InvalidParams("exponent must be positive");
  int64_t q = 1;
  for (int i = 0; i < e; ++i) q *= p;
  return PrimePowerQ{p, e, q};
}

PrimePowerQ parse_prime_power(int64_t q) {
  if (q < 2) throw NotPrime("not a prime power: " + std::to_string(q));
  auto f = factorize(q);
  if (f.size() != 1) throw NotPrime("not a prime power: " + std::to_string(q));
  return PrimePowerQ{f[0].first, f[0].second, q};
}

// ---- polynomial helpers over F_p (digit vectors, index i = coeff of x^i) ----

namespace {

using Poly = std::vector<int>;

Poly decode(int64_t idx, int64_t p, int n) {
  Poly c(n, 0);
  for (int i = 0; i < n && idx; ++i) {
    c[i] = int(idx % p);
    idx /= p;
  }
  return c;
}

int64_t encode(const Poly& c, int64_t p) {
  int64_t idx = 0;
  for (int i = int(c.size()) - 1; i >= 0; --i) idx = idx * p + c[i];
  return idx;
}

// a*b mod f, all over F_p; f monic with coefficients f[0..n], f[n] = 1
Poly polymul_mod(const Poly& a, const Poly& b, const Poly& f, int64_t p) {
  int n = int(f.size()) - 1;
  std::vector<int64_t> prod(2 * n - 1, 0);
  for (int i = 0; i < n; ++i) {
    if (!a[i]) continue;
    for (int j = 0; j < n; ++j) prod[i + j] += int64_t(a[i]) * b[j];
  }
  for (int k = 2 * n - 2; k >= n; --k) {
    int64_t c = prod[k] % p;
    if (c) {
      // x^k = x^(k-n) * (x^n) = -x^(k-n) * (f - x^n)
      for (int i = 0; i < n; ++i) prod[k - n + i] -= c * f[i];
    }
    prod[k] = 0;
  }
  Poly out(n);
  for (int i = 0; i < n; ++i) out[i] = int(((prod[i] % p) + p) % p);
  return out;
}

Poly poly_one(int n) {
  Poly c(n, 0);
  c[0] = 1;
  return c;
}

bool poly_is_one(const Poly& c) {
  if (c[0] != 1) return false;
  for (size_t i = 1; i < c.size(); ++i)
    if (c[i]) return false;
  return true;
}

Poly polypow_mod(Poly base, int64_t e, const Poly& f, int64_t p) {
  Poly acc = poly_one(int(f.size()) - 1);
  while (e > 0) {
    if (e & 1) acc = polymul_mod(acc, base, f, p);
    base = polymul_mod(base, base, f, p);
    e >>= 1;
  }
  return acc;
}

// gcd of g (degree < n) with monic f, over F_p; returns true iff gcd is constant
bool coprime_with_modulus(Poly g, Poly f, int64_t p) {
  // Euclid on coefficient vectors; degree bookkeeping explicit
  auto deg = [](const Poly& c) {
    for (int i = int(c.size()) - 1; i >= 0; --i)
      if (c[i]) return i;
    return -1;
  };
  auto inv_mod_p = [&](int64_t a) { return modpow64(a, p - 2, p); };
  Poly A = f, B = g;
  while (true) {
    int db = deg(B);
    if (db < 0) return deg(A) == 0;
    if (db == 0) return true;
    int da = deg(A);
    if (da < db) {
      std::swap(A, B);
      continue;
    }
    // A -= lead(A)/lead(B) * x^(da-db) * B
    int64_t c = int64_t(A[da]) * inv_mod_p(B[db]) % p;
    for (int i = 0; i <= db; ++i)
      A[da - db + i] = int(mod_reduce(A[da - db + i] - c * B[i], p));
    // loop continues; degree of A dropped
  }
}

bool is_irreducible(const Poly& f, int64_t p) {
  int n = int(f.size()) - 1;
  // x^(p^n) == x mod f
  Poly x(n, 0);
  if (n == 1) return true;  // monic linear
  x[1] = 1;
  int64_t pn = 1;
  for (int i = 0; i < n; ++i) pn *= p;
  Poly xpn = polypow_mod(x, pn, f, p);
  if (xpn != x) return false;
  for (int64_t r : prime_divisors(n)) {
    int64_t pm = 1;
    for (int64_t i = 0; i < n / r; ++i) pm *= p;
    Poly xp = polypow_mod(x, pm, f, p);
    // gcd(x^(p^(n/r)) - x, f) must be 1
    Poly diff(n, 0);
    for (int i = 0; i < n; ++i) diff[i] = int(mod_reduce(xp[i] - x[i], p));
    if (!coprime_with_modulus(diff, f, p)) return false;
  }
  return true;
}

}  // namespace

int64_t FieldCtx::add(int64_t a, int64_t b) const {
  int64_t out = 0, w = 1;
  for (int i = 0; i < n; ++i) {
    int64_t da = a % p, db = b % p;
    a /= p;
    b /= p;
    int64_t s = da + db;
    if (s >= p) s -= p;
    out += s * w;
    w *= p;
  }
  return out;
}

int64_t FieldCtx::neg(int64_t a) const {
  int64_t out = 0, w = 1;
  for (int i = 0; i < n; ++i) {
    int64_t da = a % p;
    a /= p;
    out += (da ? p - da : 0) * w;
    w *= p;
  }
  return out;
}

int64_t FieldCtx::sub(int64_t a, int64_t b) const { return add(a, neg(b)); }

int64_t FieldCtx::mul(int64_t a, int64_t b) const {
  if (a == 0 || b == 0) return 0;
  return antilog_table[(log_table[a] + int64_t(log_table[b])) % (Q - 1)];
}

int64_t FieldCtx::inv(int64_t a) const {
  if (a == 0) throw ZeroElement("inverse of zero");
  return antilog_table[(Q - 1 - log_table[a]) % (Q - 1)];
}

int64_t FieldCtx::pow_elt(int64_t a, int64_t k) const {
  if (a == 0) {
    if (k <= 0) throw ZeroElement("0^k with k <= 0");
    return 0;
  }
  return antilog_table[mod_reduce(log_table[a] * (k % (Q - 1)), Q - 1)];
}

int64_t FieldCtx::dlog(int64_t x) const {
  if (x == 0) throw ZeroElement("dlog of zero");
  return log_table[x];
}

int64_t FieldCtx::antilog(int64_t k) const { return antilog_table[mod_reduce(k, Q - 1)]; }

int64_t FieldCtx::from_int(int64_t c) const { return mod_reduce(c, p); }

int64_t FieldCtx::frobenius(int64_t a, int64_t power) const {
  if (a == 0) return 0;
  return pow_elt(a, mod_reduce(power, Q - 1) == 0 ? Q - 1 : power);
}

FieldCtx make_field(int64_t p, int e, int d, int64_t cap, int modulus_skip) {
  PrimePowerQ base = make_prime_power(p, e);
  if (d < 1) throw InvalidParams("degree must be positive");
  int n = e * d;
  int64_t Q = 1;
  for (int i = 0; i < n; ++i) {
    Q *= p;
    if (Q > cap) throw CapacityExceeded("field size exceeds cap");
  }

  FieldCtx ctx;
  ctx.base = base;
  ctx.d = d;
  ctx.p = p;
  ctx.n = n;
  ctx.Q = Q;

  // modulus: smallest monic irreducible of degree n, ordered by the integer
  // encoding of the coefficient sequence
  int64_t lowQ = Q / p;  // p^n / p = number of candidate lower parts
  for (int64_t c = 0;; ++c) {
    if (c >= lowQ * p) throw Error("no irreducible polynomial found");  // unreachable
    Poly f = decode(c, p, n);
    f.push_back(1);  // monic x^n
    if (is_irreducible(f, p)) {
      if (modulus_skip > 0) {
        --modulus_skip;
        continue;
      }
      ctx.modulus.assign(f.begin(), f.end());
      break;
    }
  }

  Poly f(ctx.modulus.begin(), ctx.modulus.end());
  auto fact = prime_divisors(Q - 1);

  // generator: smallest element index of order Q-1
  int64_t gen = 0;
  for (int64_t idx = 2; idx < Q; ++idx) {
    Poly a = decode(idx, p, n);
    bool ok = true;
    for (int64_t r : fact) {
      if (poly_is_one(polypow_mod(a, (Q - 1) / r, f, p))) {
        ok = false;
        break;
      }
    }
    if (ok) {
      gen = idx;
      break;
    }
  }
  if (gen == 0 && Q == 2) gen = 1;  // F_2: the unit element
  if (gen == 0) throw Error("no generator found");  // unreachable
  ctx.generator = gen;

  ctx.log_table.assign(Q, -1);
  ctx.antilog_table.assign(Q - 1, 0);
  Poly g = decode(gen, p, n);
  Poly acc = poly_one(n);
  for (int64_t k = 0; k < Q - 1; ++k) {
    int64_t idx = encode(acc, p);
    ctx.antilog_table[k] = int32_t(idx);
    ctx.log_table[idx] = int32_t(k);
    acc = polymul_mod(acc, g, f, p);
  }
  return ctx;
}

RootTower root_tower(int64_t q, Sign sign, int dim) {
  if (dim != 2 && dim != 3) throw InvalidParams("dim must be 2 or 3");
  parse_prime_power(q);
  RootTower t;
  t.q = q;
  t.sign = sign;
  t.dim = dim;
  if (dim == 3) {
    t.N = q * q * q * q * q * q - 1;
    t.exp_rho = q * q * q * q + q * q + 1;
    t.exp_omega = t.exp_rho * q_mp1(q, sign);
    t.exp_theta = q3_mp1(q, sign);
  } else {
    t.N = q * q - 1;
    t.exp_rho = 1;
    t.exp_omega = q_mp1(q, sign);
    t.exp_sigma = q + 1;
  }
  return t;
}

CycSum CycSum::root(int64_t N, int64_t e, Int c) {
  CycSum v{N, {}};
  v.add_term(e, c);
  return v;
}

void CycSum::add_term(int64_t e, const Int& c) {
  if (c == 0) return;
  int64_t r = mod_reduce(e, N);
  auto it = coeffs.find(r);
  if (it == coeffs.end()) {
    coeffs.emplace(r, c);
  } else {
    it->second += c;
    if (it->second == 0) coeffs.erase(it);
  }
}

CycSum CycSum::operator+(const CycSum& o) const {
  if (N != o.N) throw ModulusMismatch("CycSum modulus mismatch");
  CycSum out = *this;
  for (auto& [e, c] : o.coeffs) out.add_term(e, c);
  return out;
}

CycSum& CycSum::operator+=(const CycSum& o) {
  if (N != o.N) throw ModulusMismatch("CycSum modulus mismatch");
  for (auto& [e, c] : o.coeffs) add_term(e, c);
  return *this;
}

CycSum CycSum::operator-(const CycSum& o) const {
  if (N != o.N) throw ModulusMismatch("CycSum modulus mismatch");
  CycSum out = *this;
  for (auto& [e, c] : o.coeffs) out.add_term(e, -c);
  return out;
}

CycSum CycSum::scaled(const Int& c) const {
  CycSum out{N, {}};
  if (c == 0) return out;
  for (auto& [e, v] : coeffs) out.coeffs.emplace(e, v * c);
  return out;
}

CycSum CycSum::conjugate() const {
  CycSum out{N, {}};
  for (auto& [e, v] : coeffs) out.add_term(N - e, v);
  return out;
}

CycSum cyc_mul(const CycSum& a, const CycSum& b) {
  if (a.N != b.N) throw ModulusMismatch("CycSum modulus mismatch");
  CycSum out{a.N, {}};
  for (auto& [ea, ca] : a.coeffs)
    for (auto& [eb, cb] : b.coeffs) out.add_term(ea + eb, ca * cb);
  return out;
}

Rat cyc_rational(const CycSum& v) {
  // Tr(zeta_N^e) depends on e only through M = N/gcd(e,N); memoize per call.
  std::map<int64_t, Rat> tr;  // M -> mu(M)/phi(M)
  Rat out = 0;
  for (auto& [e, c] : v.coeffs) {
    int64_t g = std::gcd(e, v.N);
    int64_t M = v.N / g;
    auto it = tr.find(M);
    if (it == tr.end())
      it = tr.emplace(M, Rat(mobius(M), euler_phi(M))).first;
    out += Rat(c) * it->second;
  }
  return out;
}

Int rat_to_int(const Rat& r, const char* what) {
  if (boost::multiprecision::denominator(r) != 1)
    throw IntegralityViolation(std::string(what) + ": non-integral rational");
  return boost::multiprecision::numerator(r);
}

}  // namespace classprod
