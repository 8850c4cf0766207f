#pragma once

// Exact modular and multiplicative arithmetic on 64-bit moduli.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kloos {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/// Raised when an operation's preconditions on its inputs are violated.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// n shares a factor with the modulus.
class not_invertible : public domain_error {
 public:
  not_invertible(u64 n, u64 q, u64 gcd)
      : domain_error("not invertible: gcd(" + std::to_string(n) + ", " +
                     std::to_string(q) + ") = " + std::to_string(gcd)),
        gcd_(gcd) {}
  u64 gcd() const noexcept { return gcd_; }

 private:
  u64 gcd_;
};

/// Element `index` of a batch inversion shares a factor with the modulus.
class batch_not_invertible : public not_invertible {
 public:
  batch_not_invertible(std::size_t index, u64 n, u64 q, u64 gcd)
      : not_invertible(n, q, gcd), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

inline constexpr u64 kMaxModulus = (u64{1} << 63) - 1;

// ---------------------------------------------------------------------------
// Primitive modular operations

inline u64 mulmod(u64 x, u64 y, u64 m) {
  return static_cast<u64>(static_cast<u128>(x) * y % m);
}

inline u64 addmod(u64 x, u64 y, u64 m) {
  u64 s = x + y;  // x, y < m < 2^63, no overflow
  return s >= m ? s - m : s;
}

inline u64 submod(u64 x, u64 y, u64 m) { return x >= y ? x - y : x + m - y; }

inline u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Reduces any signed integer into [0, m).
inline u64 reduce(i64 x, u64 m) {
  i128 r = static_cast<i128>(x) % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<u64>(r);
}

struct EgcdResult {
  i64 g;
  i64 u;
  i64 v;
};

/// Extended Euclid: u*x + v*y == g == gcd(|x|, |y|).
inline EgcdResult egcd(i64 x, i64 y) {
  if (x == 0 && y == 0) throw domain_error("egcd: both arguments are zero");
  // Work in 128 bits so that |INT64_MIN| and the cofactors stay representable.
  i128 old_r = x, r = y;
  i128 old_s = 1, s = 0;
  i128 old_t = 0, t = 1;
  while (r != 0) {
    i128 quot = old_r / r;
    i128 tmp = old_r - quot * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quot * s;
    old_s = s;
    s = tmp;
    tmp = old_t - quot * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  return {static_cast<i64>(old_r), static_cast<i64>(old_s), static_cast<i64>(old_t)};
}

inline u64 gcd(u64 x, u64 y) { return std::gcd(x, y); }

// ---------------------------------------------------------------------------
// Primality and factorization

/// Deterministic Miller-Rabin for all 64-bit inputs.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  static constexpr u64 kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : kSmall) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  static constexpr u64 kBases[] = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
  for (u64 base : kBases) {
    u64 a = base % n;
    if (a == 0) continue;
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace detail {

inline constexpr u64 kTrialDivisionLimit = 1000;

// Brent's variant of Pollard rho. Deterministic: increments c on failure.
inline u64 pollard_rho(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    auto f = [&](u64 x) { return addmod(mulmod(x, x, n), c, n); };
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    u64 r = 1;
    constexpr u64 m = 128;
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void factor_into(u64 n, std::map<u64, int>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  u64 d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace detail

struct PrimePower {
  u64 p;
  int alpha;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

class Modulus;
inline Modulus factorize_uncached(u64 q);

/// A modulus q >= 2 together with its factorization and the divisor-type
/// functions used by every bound: omega, tau, tau3 and phi.
class Modulus {
 public:
  u64 value() const noexcept { return q_; }
  const std::vector<PrimePower>& factors() const noexcept { return factors_; }
  int omega() const noexcept { return static_cast<int>(factors_.size()); }
  u64 tau() const noexcept { return tau_; }
  u64 tau3() const noexcept { return tau3_; }
  u64 phi() const noexcept { return phi_; }
  bool is_prime() const noexcept { return factors_.size() == 1 && factors_[0].alpha == 1; }
  bool is_even() const noexcept { return (q_ & 1) == 0; }

  friend bool operator==(const Modulus& x, const Modulus& y) { return x.q_ == y.q_; }

 private:
  friend Modulus factorize_uncached(u64 q);
  u64 q_ = 0;
  std::vector<PrimePower> factors_;
  u64 tau_ = 1;
  u64 tau3_ = 1;
  u64 phi_ = 1;
};

inline Modulus factorize_uncached(u64 q) {
  if (q < 2) throw domain_error("factorize: modulus must be >= 2, got " + std::to_string(q));
  if (q > kMaxModulus) throw domain_error("factorize: modulus must be < 2^63");
  std::map<u64, int> found;
  u64 rest = q;
  for (u64 p = 2; p <= detail::kTrialDivisionLimit && p * p <= rest; p += (p == 2 ? 1 : 2)) {
    while (rest % p == 0) {
      ++found[p];
      rest /= p;
    }
  }
  detail::factor_into(rest, found);

  Modulus m;
  m.q_ = q;
  for (auto [p, alpha] : found) {
    m.factors_.push_back({p, alpha});
    const u64 a = static_cast<u64>(alpha);
    m.tau_ *= a + 1;
    m.tau3_ *= (a + 1) * (a + 2) / 2;
    u64 pk = 1;
    for (int i = 1; i < alpha; ++i) pk *= p;
    m.phi_ *= pk * (p - 1);
  }
  return m;
}

/// Factorizes q (2 <= q < 2^63); results are cached per q for the lifetime
/// of the process.
inline Modulus factorize(i64 q) {
  if (q < 2) throw domain_error("factorize: modulus must be >= 2, got " + std::to_string(q));
  static std::mutex mutex;
  static std::unordered_map<u64, std::shared_ptr<const Modulus>> cache;
  const u64 key = static_cast<u64>(q);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return *it->second;
  }
  auto m = std::make_shared<const Modulus>(factorize_uncached(key));
  std::lock_guard lock(mutex);
  cache.emplace(key, m);
  return *m;
}

/// Residue class modulo q, always stored in [0, q).
class Residue {
 public:
  Residue(i64 value, const Modulus& q) : value_(reduce(value, q.value())), q_(q.value()) {}
  static Residue from_unsigned(u64 value, const Modulus& q) {
    Residue r(0, q);
    r.value_ = value % q.value();
    return r;
  }

  u64 value() const noexcept { return value_; }
  u64 modulus() const noexcept { return q_; }

  friend bool operator==(const Residue&, const Residue&) = default;

 private:
  u64 value_;
  u64 q_;
};

/// Inverse of n modulo q in [1, q) (or 0 when q == 1, never reached).
inline Residue modinv(i64 n, const Modulus& q) {
  const u64 m = q.value();
  const u64 r = reduce(n, m);
  const u64 g = gcd(r, m);
  if (g != 1) throw not_invertible(r, m, g);
  // Bezout on (r, m); both fit in i64 since m < 2^63.
  auto e = egcd(static_cast<i64>(r), static_cast<i64>(m));
  return Residue(e.u, q);
}

/// Elementwise inverses using a single inversion (prefix-product trick).
inline std::vector<Residue> batch_modinv(std::span<const i64> ns, const Modulus& q) {
  const u64 m = q.value();
  std::vector<u64> reduced(ns.size());
  std::vector<u64> prefix(ns.size());
  u64 acc = 1 % m;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    reduced[i] = reduce(ns[i], m);
    const u64 g = gcd(reduced[i], m);
    if (g != 1) throw batch_not_invertible(i, reduced[i], m, g);
    acc = mulmod(acc, reduced[i], m);
    prefix[i] = acc;
  }
  std::vector<Residue> out(ns.size(), Residue(0, q));
  if (ns.empty()) return out;
  u64 inv = modinv(static_cast<i64>(acc), q).value();
  for (std::size_t i = ns.size(); i-- > 0;) {
    const u64 before = i == 0 ? 1 % m : prefix[i - 1];
    out[i] = Residue::from_unsigned(mulmod(inv, before, m), q);
    inv = mulmod(inv, reduced[i], m);
  }
  return out;
}

/// Unchecked variant on raw values; entries must already be units mod m.
inline void batch_modinv_inplace(std::span<u64> values, u64 m) {
  if (values.empty()) return;
  std::vector<u64> prefix(values.size());
  u64 acc = 1 % m;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc = mulmod(acc, values[i], m);
    prefix[i] = acc;
  }
  auto e = egcd(static_cast<i64>(acc), static_cast<i64>(m));
  u64 inv = reduce(e.u, m);
  for (std::size_t i = values.size(); i-- > 0;) {
    const u64 before = i == 0 ? 1 % m : prefix[i - 1];
    const u64 vi = values[i];
    values[i] = mulmod(inv, before, m);
    inv = mulmod(inv, vi, m);
  }
}

/// v_p(n) for n != 0.
inline int valuation(u64 n, u64 p) {
  int v = 0;
  while (n != 0 && n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

inline u64 ipow(u64 base, int exp) {
  u64 r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

/// Chinese remaindering of x = r1 (mod m1), x = r2 (mod m2) for coprime moduli.
inline u64 crt_pair(u64 r1, u64 m1, u64 r2, u64 m2) {
  const u64 m = m1 * m2;
  auto e = egcd(static_cast<i64>(m1 % m2), static_cast<i64>(m2));
  const u64 inv_m1 = reduce(e.u, m2);
  const u64 t = mulmod(submod(r2 % m2, r1 % m2, m2), inv_m1, m2);
  return addmod(r1 % m, mulmod(t, m1, m), m);
}

}  // namespace kloos
