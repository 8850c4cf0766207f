#pragma once

// Solution counts of the quadratic-type congruences used in the bilinear
// estimates, each with a brute-force oracle and its explicit upper bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "kloos/arith.hpp"

namespace kloos {

enum class CountMethod { brute, multiplicative, hashed };

inline const char* to_string(CountMethod m) {
  switch (m) {
    case CountMethod::brute: return "brute";
    case CountMethod::multiplicative: return "multiplicative";
    case CountMethod::hashed: return "hashed";
  }
  return "?";
}

struct CountResult {
  u64 value = 0;
  /// Upper bound with explicit constants; +inf when none applies.
  double bound = std::numeric_limits<double>::infinity();
  CountMethod method = CountMethod::brute;
  /// Reference envelope for estimates with implicit constants (NaN if none).
  double envelope = std::numeric_limits<double>::quiet_NaN();

  bool within_bound() const { return static_cast<double>(value) <= bound; }
};

// ---------------------------------------------------------------------------
// Square roots modulo prime powers

/// Tonelli-Shanks: a root of x^2 = a (mod p) for odd prime p and quadratic
/// residue a != 0.
inline u64 sqrt_mod_prime(u64 a, u64 p) {
  a %= p;
  if (p == 2 || a == 0) return a;
  if (powmod(a, (p - 1) / 2, p) != 1) throw domain_error("sqrt_mod_prime: non-residue");
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  u64 s = 0, d = p - 1;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  u64 z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  u64 c = powmod(z, d, p);
  u64 x = powmod(a, (d + 1) / 2, p);
  u64 t = powmod(a, d, p);
  u64 m = s;
  while (t != 1) {
    u64 i = 0;
    u64 tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    u64 bpow = c;
    for (u64 j = 0; j + 1 < m - i; ++j) bpow = mulmod(bpow, bpow, p);
    x = mulmod(x, bpow, p);
    c = mulmod(bpow, bpow, p);
    t = mulmod(t, c, p);
    m = i;
  }
  return x;
}

/// All roots y (mod p^e) of y^2 = a for a unit a, e >= 1. Odd p: Tonelli-
/// Shanks lifted by Hensel steps; p = 2 handled by the mod 2, 4, 8 cases.
inline std::vector<u64> unit_square_roots(u64 a, u64 p, int e) {
  const u64 pe = ipow(p, e);
  a %= pe;
  if (p == 2) {
    if (e == 1) return {1};
    if (e == 2) return a % 4 == 1 ? std::vector<u64>{1, 3} : std::vector<u64>{};
    if (a % 8 != 1) return {};
    // Lift a root bit by bit: r^2 = a (mod 2^k) for k = 3 .. e.
    u64 r = 1;
    for (int k = 3; k < e; ++k) {
      const u64 mod = u64{1} << (k + 1);
      if (mulmod(r, r, mod) != a % mod) r += u64{1} << (k - 1);
    }
    const u64 half = pe / 2;
    std::vector<u64> roots = {r % pe, (pe - r) % pe, (r + half) % pe, (pe - r + half) % pe};
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
  }
  if (powmod(a % p, (p - 1) / 2, p) != 1) return {};
  u64 r = sqrt_mod_prime(a % p, p);
  // Hensel: r <- r - (r^2 - a) / (2r) modulo successively higher powers.
  u64 mod = p;
  for (int k = 1; k < e; ++k) {
    mod *= p;
    const u64 f = submod(mulmod(r, r, mod), a % mod, mod);
    const u64 inv2r = reduce(egcd(static_cast<i64>(mulmod(2, r, mod)), static_cast<i64>(mod)).u, mod);
    r = submod(r, mulmod(f, inv2r, mod), mod);
  }
  std::vector<u64> roots = {r, pe - r};
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// nu(p^alpha; A) by the case split on beta = v_p(A): beta = alpha gives
/// p^[alpha/2]; odd beta < alpha gives 0; even beta = 2 gamma descends to a
/// unit root count modulo p^(alpha - 2 gamma), times p^gamma.
inline u64 nu_prime_power(i64 A, u64 p, int alpha) {
  const u64 pa = ipow(p, alpha);
  const u64 r = reduce(A, pa);
  if (r == 0) return ipow(p, alpha / 2);
  const int beta = valuation(r, p);
  if (beta % 2 == 1) return 0;
  const int gamma = beta / 2;
  const u64 unit = r / ipow(p, beta);
  return unit_square_roots(unit, p, alpha - 2 * gamma).size() * ipow(p, gamma);
}

/// All x in [0, q) with x^2 = A (mod q), assembled by CRT. Intended for
/// moduli where the root count is small enough to list.
inline std::vector<u64> square_roots(i64 A, const Modulus& q) {
  std::vector<u64> acc = {0};
  u64 acc_mod = 1;
  for (auto [p, alpha] : q.factors()) {
    const u64 pa = ipow(p, alpha);
    const u64 r = reduce(A, pa);
    std::vector<u64> local;
    if (r == 0) {
      const u64 step = ipow(p, (alpha + 1) / 2);
      for (u64 x = 0; x < pa; x += step) local.push_back(x);
    } else {
      const int beta = valuation(r, p);
      if (beta % 2 == 0) {
        const int gamma = beta / 2;
        const u64 pg = ipow(p, gamma);
        const int e = alpha - 2 * gamma;
        const u64 pe = ipow(p, e);
        const u64 lift = ipow(p, alpha - gamma);  // x = pg * y, y mod p^(alpha-gamma)
        for (u64 y0 : unit_square_roots(r / ipow(p, beta), p, e)) {
          for (u64 y = y0; y < lift; y += pe) local.push_back(pg * y % pa);
        }
      }
    }
    std::vector<u64> next;
    for (u64 x : acc) {
      for (u64 y : local) next.push_back(crt_pair(x, acc_mod, y, pa));
    }
    acc = std::move(next);
    acc_mod *= pa;
    if (acc.empty()) break;
  }
  std::sort(acc.begin(), acc.end());
  return acc;
}

// ---------------------------------------------------------------------------
// nu and mu counts

namespace detail {
inline double sqrt_gcd(i64 A, u64 q) { return std::sqrt(static_cast<double>(gcd(reduce(A, q), q))); }
inline double pow2(int k) { return std::ldexp(1.0, k); }
}  // namespace detail

/// nu(q; A) <= 2^(omega(q) + c) sqrt((A, q)), c = 1 for even q.
inline double nu_bound(const Modulus& q, i64 A) {
  return detail::pow2(q.omega() + (q.is_even() ? 1 : 0)) * detail::sqrt_gcd(A, q.value());
}

/// Number of x in [1, q] with x^2 = A (mod q), multiplicative fast path.
inline CountResult nu(const Modulus& q, i64 A) {
  u64 count = 1;
  for (auto [p, alpha] : q.factors()) {
    count *= nu_prime_power(A, p, alpha);
    if (count == 0) break;
  }
  return {count, nu_bound(q, A), CountMethod::multiplicative};
}

inline CountResult nu_brute(const Modulus& q, i64 A) {
  const u64 m = q.value();
  const u64 target = reduce(A, m);
  u64 count = 0;
  for (u64 x = 1; x <= m; ++x) count += mulmod(x % m, x % m, m) == target;
  return {count, nu_bound(q, A), CountMethod::brute};
}

/// mu(q; a) <= 4 * 2^omega(q) * sqrt((4a + 1, q)).
inline double mu_bound(const Modulus& q, i64 a) {
  const i128 A = static_cast<i128>(a) * 4 + 1;
  const u64 g = gcd(static_cast<u64>((A % q.value() + q.value()) % q.value()), q.value());
  return 4.0 * detail::pow2(q.omega()) * std::sqrt(static_cast<double>(g));
}

/// Number of x in [1, q] with x(x + 1) = a (mod q). With y = 2x + 1 this is
/// y^2 = 4a + 1 (mod 4q); y mod 4q and y + 2q give the same x, and every odd
/// y mod 2q comes from exactly one x, so the count is nu(4q; 4a + 1) / 2.
inline CountResult mu_count(const Modulus& q, i64 a) {
  if (q.value() > kMaxModulus / 4) throw domain_error("mu_count: 4q must be < 2^63");
  const Modulus q4 = factorize(static_cast<i64>(4 * q.value()));
  const i64 A = static_cast<i64>((static_cast<i128>(reduce(a, q4.value())) * 4 + 1) % q4.value());
  return {nu(q4, A).value / 2, mu_bound(q, a), CountMethod::multiplicative};
}

inline CountResult mu_count_brute(const Modulus& q, i64 a) {
  const u64 m = q.value();
  const u64 target = reduce(a, m);
  u64 count = 0;
  for (u64 x = 1; x <= m; ++x) count += mulmod(x % m, (x + 1) % m, m) == target;
  return {count, mu_bound(q, a), CountMethod::brute};
}

// ---------------------------------------------------------------------------
// Roots of unity of order dividing n

/// Number of z in [1, h] with z^n = 1 (mod h), by enumeration.
inline u64 e_roots_brute(u64 n, u64 h) {
  if (h == 1) return 1;
  u64 count = 0;
  for (u64 z = 1; z <= h; ++z) count += powmod(z, n, h) == 1;
  return count;
}

/// e_2(p^nu) = 1 (p = 2, nu = 1), 2 (p = 2, nu = 2 or p odd), 4 (p = 2, nu >= 3).
inline u64 e2_prime_power(u64 p, int v) {
  if (p == 2) return v == 1 ? 1 : (v == 2 ? 2 : 4);
  return 2;
}

/// e_n(h): closed form for n = 2 (multiplicative over h), enumeration otherwise.
inline u64 e_roots(u64 n, u64 h) {
  if (h < 1) throw domain_error("e_roots: h must be >= 1");
  if (n != 2) return e_roots_brute(n, h);
  if (h == 1) return 1;
  u64 count = 1;
  const Modulus m = factorize(static_cast<i64>(h));
  for (auto [p, alpha] : m.factors()) count *= e2_prime_power(p, alpha);
  return count;
}

// ---------------------------------------------------------------------------
// kappa(q): pairs with g(x) = g(y), g(x) = a inv(x) + b x

inline double kappa_bound(const Modulus& q) {
  return detail::pow2(q.omega() + 1) * static_cast<double>(q.tau()) * static_cast<double>(q.value());
}

namespace detail {
inline void require_coprime_ab(u64 a, u64 b, u64 m, const char* what) {
  if (gcd(mulmod(a, b, m), m) != 1) throw domain_error(std::string(what) + ": gcd(ab, q) != 1");
}

inline std::vector<u64> inverse_table(u64 m) {
  std::vector<u64> units;
  for (u64 r = 1; r < m; ++r) {
    if (gcd(r, m) == 1) units.push_back(r);
  }
  std::vector<u64> inv = units;
  batch_modinv_inplace(inv, m);
  std::vector<u64> table(m, 0);
  for (std::size_t i = 0; i < units.size(); ++i) table[units[i]] = inv[i];
  if (m == 1) table.assign(1, 0);
  return table;
}
}  // namespace detail

/// Groups units x by g(x) and sums the squared class sizes.
inline CountResult kappa(const Modulus& q, const Residue& a, const Residue& b) {
  const u64 m = q.value();
  detail::require_coprime_ab(a.value(), b.value(), m, "kappa");
  const auto inv = detail::inverse_table(m);
  std::vector<u64> class_size(m, 0);
  for (u64 x = 1; x <= m; ++x) {
    const u64 xr = x % m;
    if (inv[xr] == 0) continue;
    ++class_size[addmod(mulmod(a.value(), inv[xr], m), mulmod(b.value(), xr, m), m)];
  }
  u64 total = 0;
  for (u64 c : class_size) total += c * c;
  return {total, kappa_bound(q), CountMethod::hashed};
}

/// Counts pairs of units through the factored form
/// (y - x)(y - a inv(b) inv(x)) = 0 (mod q), stepping the product
/// incrementally in y.
inline CountResult kappa_brute(const Modulus& q, const Residue& a, const Residue& b) {
  const u64 m = q.value();
  detail::require_coprime_ab(a.value(), b.value(), m, "kappa");
  const auto inv = detail::inverse_table(m);
  const u64 ab = mulmod(a.value(), inv[b.value()], m);
  u64 total = 0;
  for (u64 x = 1; x <= m; ++x) {
    const u64 xr = x % m;
    if (inv[xr] == 0) continue;
    const u64 v = mulmod(ab, inv[xr], m);
    // f(y) = (y - x)(y - v); f(y + 1) - f(y) = 2y + 1 - x - v.
    u64 f = mulmod(submod(1 % m, xr, m), submod(1 % m, v, m), m);
    u64 d = submod(3 % m, addmod(xr, v, m), m);
    for (u64 y = 1; y <= m; ++y) {
      if (f == 0 && inv[y % m] != 0) ++total;
      f = addmod(f, d, m);
      d = addmod(d, 2 % m, m);
    }
  }
  return {total, kappa_bound(q), CountMethod::brute};
}

// ---------------------------------------------------------------------------
// I_q(N): inv(x1) + inv(x2) = inv(y1) + inv(y2), x1 + x2 = y1 + y2, all in (N, N1]

/// (2c)^3 2^omega(q) tau3(q) N^2 with c = N1 / N.
inline double count_I_bound(const Modulus& q, u64 N, u64 N1) {
  const double c = static_cast<double>(N1) / static_cast<double>(N);
  return 8.0 * c * c * c * detail::pow2(q.omega()) * static_cast<double>(q.tau3()) *
         static_cast<double>(N) * static_cast<double>(N);
}

namespace detail {
inline void require_I_range(const Modulus& q, u64 N, u64 N1) {
  if (!(1 < N && N < N1 && N1 <= q.value())) {
    throw domain_error("count_I: requires 1 < N < N1 <= q, got N = " + std::to_string(N) +
                       ", N1 = " + std::to_string(N1) + ", q = " + std::to_string(q.value()));
  }
}

inline std::vector<u64> units_in(u64 lo_exclusive, u64 hi, u64 m) {
  std::vector<u64> out;
  for (u64 x = lo_exclusive + 1; x <= hi; ++x) {
    if (gcd(x % m, m) == 1) out.push_back(x);
  }
  return out;
}

template <typename Key>
u64 sum_squared_multiplicities(std::vector<Key>& keys) {
  std::sort(keys.begin(), keys.end());
  u64 total = 0;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    const u64 run = j - i;
    total += run * run;
    i = j;
  }
  return total;
}
}  // namespace detail

inline CountResult count_I(const Modulus& q, u64 N, u64 N1) {
  detail::require_I_range(q, N, N1);
  const u64 m = q.value();
  const auto xs = detail::units_in(N, N1, m);
  std::vector<u64> inv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) inv[i] = modinv(static_cast<i64>(xs[i] % m), q).value();
  std::vector<u128> keys;
  keys.reserve(xs.size() * xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const u64 inv_sum = addmod(inv[i], inv[j], m);
      const u64 sum = (xs[i] + xs[j]) % m;
      keys.push_back(static_cast<u128>(inv_sum) * m + sum);
    }
  }
  return {detail::sum_squared_multiplicities(keys), count_I_bound(q, N, N1), CountMethod::hashed};
}

inline CountResult count_I_brute(const Modulus& q, u64 N, u64 N1) {
  detail::require_I_range(q, N, N1);
  const u64 m = q.value();
  const auto xs = detail::units_in(N, N1, m);
  std::vector<u64> inv(xs.size()), red(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    red[i] = xs[i] % m;
    inv[i] = modinv(static_cast<i64>(red[i]), q).value();
  }
  const std::size_t L = xs.size();
  u64 total = 0;
  for (std::size_t x1 = 0; x1 < L; ++x1) {
    for (std::size_t x2 = 0; x2 < L; ++x2) {
      const u64 s = addmod(red[x1], red[x2], m);
      const u64 si = addmod(inv[x1], inv[x2], m);
      for (std::size_t y1 = 0; y1 < L; ++y1) {
        for (std::size_t y2 = 0; y2 < L; ++y2) {
          total += addmod(red[y1], red[y2], m) == s && addmod(inv[y1], inv[y2], m) == si;
        }
      }
    }
  }
  return {total, count_I_bound(q, N, N1), CountMethod::brute};
}

// ---------------------------------------------------------------------------
// J_q(M): inv(x1) + inv(x2) = inv(y1) + inv(y2), all in (M, 2M]

inline constexpr double kDefaultEpsilon = 0.05;

/// M^(2 + eps) (M^(3/2) / sqrt(q) + 1); the estimate carries an implicit
/// constant, so this is a trend reference only.
inline double count_J_envelope(const Modulus& q, u64 M, double eps) {
  const double Md = static_cast<double>(M);
  return std::pow(Md, 2.0 + eps) * (std::pow(Md, 1.5) / std::sqrt(static_cast<double>(q.value())) + 1.0);
}

namespace detail {
inline void require_J_range(const Modulus& q, u64 M) {
  if (!(1 < M && 2 * M < q.value())) {
    throw domain_error("count_J: requires 1 < M < q/2, got M = " + std::to_string(M) +
                       ", q = " + std::to_string(q.value()));
  }
}
}  // namespace detail

inline CountResult count_J(const Modulus& q, u64 M, double eps = kDefaultEpsilon) {
  detail::require_J_range(q, M);
  const u64 m = q.value();
  const auto xs = detail::units_in(M, 2 * M, m);
  std::vector<u64> inv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) inv[i] = modinv(static_cast<i64>(xs[i]), q).value();
  std::vector<u64> keys;
  keys.reserve(xs.size() * xs.size());
  for (u64 u : inv) {
    for (u64 v : inv) keys.push_back(addmod(u, v, m));
  }
  CountResult r{detail::sum_squared_multiplicities(keys), std::numeric_limits<double>::infinity(),
                CountMethod::hashed};
  r.envelope = count_J_envelope(q, M, eps);
  return r;
}

inline CountResult count_J_brute(const Modulus& q, u64 M, double eps = kDefaultEpsilon) {
  detail::require_J_range(q, M);
  const u64 m = q.value();
  const auto xs = detail::units_in(M, 2 * M, m);
  std::vector<u64> inv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) inv[i] = modinv(static_cast<i64>(xs[i]), q).value();
  u64 total = 0;
  for (u64 x1 : inv) {
    for (u64 x2 : inv) {
      const u64 s = addmod(x1, x2, m);
      for (u64 y1 : inv) {
        for (u64 y2 : inv) total += addmod(y1, y2, m) == s;
      }
    }
  }
  CountResult r{total, std::numeric_limits<double>::infinity(), CountMethod::brute};
  r.envelope = count_J_envelope(q, M, eps);
  return r;
}

}  // namespace kloos
