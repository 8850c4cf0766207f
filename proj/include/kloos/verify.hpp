#pragma once

// Bound formulas, T_q(X) sweeps and the prime congruence experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kloos/arith.hpp"
#include "kloos/expsum.hpp"
#include "kloos/tables.hpp"
#include "kloos/vaughan.hpp"

namespace kloos {

/// Raised when two independent computations of the same quantity disagree.
class inconsistency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Delta and thresholds

/// Admissible range test for q^(3/4) <= X <= (q/2)^(3/2), on the log scale.
inline bool in_theorem_range(const Modulus& q, double X) {
  const double lq = std::log2(static_cast<double>(q.value()));
  const double lx = std::log2(X);
  return X > 0 && lx >= 0.75 * lq - 1e-12 && lx <= 1.5 * (lq - 1.0) + 1e-12;
}

/// Branch 1 of Delta, (q^(3/4) / X)^(1/7); branch 2, (q^(2/3) / X)^(3/35).
/// Evaluated from base-2 logarithms so that powers of two are exact.
inline double delta_branch(const Modulus& q, double X, int branch) {
  const double lq = std::log2(static_cast<double>(q.value()));
  const double lx = std::log2(X);
  if (branch == 1) return std::exp2((3.0 * lq - 4.0 * lx) / 28.0);
  if (branch == 2) return std::exp2((2.0 * lq - 3.0 * lx) / 35.0);
  throw domain_error("delta_branch: branch must be 1 or 2");
}

/// Delta(q, X): branch 1 up to X = q^(7/8), branch 2 beyond.
inline double delta_theorem1(const Modulus& q, double X) {
  if (!in_theorem_range(q, X)) throw domain_error("delta_theorem1: X outside [q^(3/4), (q/2)^(3/2)]");
  const double lq = std::log2(static_cast<double>(q.value()));
  return delta_branch(q, X, 8.0 * std::log2(X) <= 7.0 * lq ? 1 : 2);
}

struct Rational {
  i64 num = 0;
  i64 den = 1;

  static Rational make(i64 n, i64 d) {
    if (d == 0) throw domain_error("Rational: zero denominator");
    if (d < 0) n = -n, d = -d;
    const i64 g = std::gcd(n, d);
    return {n / g, d / g};
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Threshold exponent for k-fold sums with prime q.
inline Rational ck_theorem3(int k) {
  if (k < 3) throw domain_error("ck_theorem3: k must be >= 3");
  if (k <= 9) return Rational::make(2 * k + 31, 3 * k + 29);
  return Rational::make(3 * k + 22, 4 * (k + 5));
}

/// Threshold exponent for k-fold sums with composite q.
inline Rational ck_theorem4(int k) {
  if (k < 3) throw domain_error("ck_theorem4: k must be >= 3");
  if (k <= 16) return Rational::make(2 * (k + 33), 3 * k + 64);
  return Rational::make(3 * k + 50, 4 * (k + 12));
}

// ---------------------------------------------------------------------------
// Reports

/// One report line. `exact` is set for integer counts and then replaces
/// value_re in serialized output.
struct ReportRow {
  std::string method;
  double value_re = 0.0;
  double value_im = 0.0;
  std::optional<u64> exact;
  double err = 0.0;
  u64 terms = 0;
  double bound = 0.0;
  double ratio = 0.0;
  std::vector<std::pair<std::string, std::string>> params;
};

struct BoundReport {
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
};

namespace detail {
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

/// |T_q(X)| against X q^eps Delta for every grid point, plus a row checking
/// |T_q(X)| <= 1.04 X + err. Grid points outside the admissible range or
/// above the table limit are skipped with a note. Rows come in grid order.
inline BoundReport sweep_T(const Modulus& q, const std::vector<double>& grid, const Residue& a,
                           const Residue& b, const PrimeTable& table, double eps = 0.05) {
  BoundReport report;
  const KloostermanContext ctx(q);
  const double qd = static_cast<double>(q.value());
  for (double Xr : grid) {
    // T_q(X) for real X is the sum over n <= floor(X).
    if (!in_theorem_range(q, Xr)) {
      report.notes.push_back("skipped X=" + detail::fmt17(Xr) + ": outside [q^(3/4), (q/2)^(3/2)]");
      continue;
    }
    const u64 X = static_cast<u64>(std::floor(Xr));
    if (X > table.limit()) {
      report.notes.push_back("skipped X=" + detail::fmt17(Xr) + ": above table limit");
      continue;
    }
    const SumSpec spec{q, a, b, X, Weight::mangoldt};
    const ComplexSum T = lambda_sum(ctx, spec, table);
    const double delta = delta_theorem1(q, Xr);
    const double reference = Xr * std::pow(qd, eps) * delta;
    std::vector<std::pair<std::string, std::string>> params{
        {"q", std::to_string(q.value())}, {"X", detail::fmt17(Xr)},
        {"a", std::to_string(a.value())}, {"b", std::to_string(b.value())}};
    ReportRow main{"delta-reference", T.re, T.im, std::nullopt, T.err, T.terms, reference,
                   T.abs() / reference, params};
    main.params.emplace_back("epsilon", detail::fmt17(eps));
    main.params.emplace_back("delta", detail::fmt17(delta));
    report.rows.push_back(std::move(main));

    const double cheb = 1.04 * Xr;
    ReportRow sanity{"chebyshev", T.re, T.im, std::nullopt, T.err, T.terms, cheb + T.err,
                     T.abs() / cheb, params};
    sanity.params.emplace_back("pass", T.abs() <= cheb + T.err ? "true" : "false");
    report.rows.push_back(std::move(sanity));
  }
  return report;
}

inline bool sanity_ok(const BoundReport& r) {
  for (const auto& row : r.rows) {
    if (!std::isfinite(row.ratio)) return false;
    if (row.method == "chebyshev" && !(row.value_re * row.value_re + row.value_im * row.value_im <=
                                       row.bound * row.bound)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Exact cyclic convolution

enum class ConvMethod { automatic, schoolbook, ntt };

namespace detail {

inline constexpr u64 kSchoolbookLimit = 10'000;

inline u64 checked_total(const std::vector<u64>& x) {
  u128 s = 0;
  for (u64 v : x) s += v;
  if (s > UINT64_MAX) throw domain_error("convolution: count exceeds 64 bits");
  return static_cast<u64>(s);
}

inline std::vector<u64> convolve_schoolbook(const std::vector<u64>& x, const std::vector<u64>& y) {
  const std::size_t n = x.size();
  std::vector<u64> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (y[j] == 0) continue;
      std::size_t r = i + j;
      if (r >= n) r -= n;
      out[r] += x[i] * y[j];
    }
  }
  return out;
}

inline void ntt(std::vector<u64>& a, u64 mod, u64 root, bool invert) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    u64 w = powmod(root, (mod - 1) / len, mod);
    if (invert) w = powmod(w, mod - 2, mod);
    for (std::size_t i = 0; i < n; i += len) {
      u64 wk = 1;
      for (std::size_t j = 0; j < len / 2; ++j) {
        const u64 u = a[i + j];
        const u64 v = a[i + j + len / 2] * wk % mod;
        a[i + j] = u + v < mod ? u + v : u + v - mod;
        a[i + j + len / 2] = u >= v ? u - v : u + mod - v;
        wk = wk * w % mod;
      }
    }
  }
  if (invert) {
    const u64 ninv = powmod(n % mod, mod - 2, mod);
    for (u64& v : a) v = v * ninv % mod;
  }
}

struct NttPrime {
  u64 mod;
  u64 root;
};
inline constexpr NttPrime kNttPrimes[3] = {{998244353, 3}, {167772161, 3}, {469762049, 3}};

inline std::vector<u64> convolve_ntt(const std::vector<u64>& x, const std::vector<u64>& y) {
  const std::size_t n = x.size();
  std::size_t len = 1;
  while (len < 2 * n - 1) len <<= 1;
  if (len > (std::size_t{1} << 23)) throw domain_error("convolution: modulus too large for NTT");
  std::vector<std::vector<u64>> res;
  for (const auto& p : kNttPrimes) {
    std::vector<u64> fa(len, 0), fb(len, 0);
    for (std::size_t i = 0; i < n; ++i) fa[i] = x[i] % p.mod, fb[i] = y[i] % p.mod;
    ntt(fa, p.mod, p.root, false);
    ntt(fb, p.mod, p.root, false);
    for (std::size_t i = 0; i < len; ++i) fa[i] = fa[i] * fb[i] % p.mod;
    ntt(fa, p.mod, p.root, true);
    res.push_back(std::move(fa));
  }
  // Garner reconstruction; every linear coefficient is < 2^64 < m0 m1 m2.
  const u64 m0 = kNttPrimes[0].mod, m1 = kNttPrimes[1].mod, m2 = kNttPrimes[2].mod;
  const u64 inv_m0_m1 = powmod(m0 % m1, m1 - 2, m1);
  const u64 inv_m0m1_m2 = powmod(mulmod(m0, m1, m2), m2 - 2, m2);
  std::vector<u64> out(n, 0);
  for (std::size_t i = 0; i < 2 * n - 1; ++i) {
    const u64 r0 = res[0][i], r1 = res[1][i], r2 = res[2][i];
    const u64 t1 = mulmod(submod(r1, r0 % m1, m1), inv_m0_m1, m1);
    const u128 x01 = static_cast<u128>(r0) + static_cast<u128>(m0) * t1;
    const u64 x01_m2 = static_cast<u64>(x01 % m2);
    const u64 t2 = mulmod(submod(r2, x01_m2, m2), inv_m0m1_m2, m2);
    const u128 v = x01 + static_cast<u128>(m0) * m1 * t2;
    out[i % n] += static_cast<u64>(v);
  }
  return out;
}

}  // namespace detail

/// Exact cyclic convolution of two count vectors of equal length q. The NTT
/// path re-checks one pseudo-randomly chosen output entry against the direct
/// sum and throws `inconsistency` on disagreement.
inline std::vector<u64> cyclic_convolve(const std::vector<u64>& x, const std::vector<u64>& y,
                                        ConvMethod method = ConvMethod::automatic) {
  if (x.size() != y.size() || x.empty()) throw domain_error("convolution: size mismatch");
  const u128 mass = static_cast<u128>(detail::checked_total(x)) * detail::checked_total(y);
  if (mass > UINT64_MAX) throw domain_error("convolution: count exceeds 64 bits");
  const std::size_t n = x.size();
  if (method == ConvMethod::automatic) {
    method = n <= detail::kSchoolbookLimit ? ConvMethod::schoolbook : ConvMethod::ntt;
  }
  if (method == ConvMethod::schoolbook) return detail::convolve_schoolbook(x, y);
  std::vector<u64> out = detail::convolve_ntt(x, y);
  std::mt19937_64 rng(n * 0x9E3779B97F4A7C15ull + static_cast<u64>(mass));
  const std::size_t r = rng() % n;
  u64 direct = 0;
  for (std::size_t i = 0; i < n; ++i) direct += x[i] * y[(r + n - i) % n];
  if (direct != out[r]) {
    throw inconsistency("convolution: NTT entry " + std::to_string(r) + " = " +
                        std::to_string(out[r]) + " but direct sum = " + std::to_string(direct));
  }
  return out;
}

/// k-fold cyclic self-convolution by repeated squaring.
inline std::vector<u64> convolution_power(const std::vector<u64>& d, int k,
                                          ConvMethod method = ConvMethod::automatic) {
  if (k < 1) throw domain_error("convolution_power: k must be >= 1");
  std::vector<u64> result, base = d;
  bool have = false;
  for (int e = k;;) {
    if (e & 1) {
      result = have ? cyclic_convolve(result, base, method) : base;
      have = true;
    }
    e >>= 1;
    if (!e) break;
    base = cyclic_convolve(base, base, method);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Congruence experiments

struct CongruenceWitness {
  std::vector<u64> primes;
  u64 residual = 0;  ///< the congruence's left side reduced mod q
};

struct Theorem2Result {
  u64 count = 0;                ///< convolution method
  std::optional<u64> brute;     ///< triple loop, when pi1 <= kTheorem2BruteLimit
  u64 pi1 = 0;
  double main_term = 0.0;       ///< pi1^3 / q
  double remainder = 0.0;       ///< count - main_term
  double delta = 0.0;           ///< (main_term - count) / main_term
};

inline constexpr u64 kTheorem2BruteLimit = 60;

namespace detail {

struct Theorem2Setup {
  u64 q;
  u64 m;
  std::vector<u64> primes;  ///< primes in (N, 2N]
  std::vector<u64> v;       ///< v[r] = #{p : p = r mod q}
};

inline Theorem2Setup theorem2_setup(const Modulus& q, const Residue& m, u64 N, const PrimeTable& table) {
  if (!q.is_prime()) throw domain_error("count_theorem2: q must be prime");
  require_same_modulus(m, q, "count_theorem2");
  if (N >= q.value()) throw domain_error("count_theorem2: violated N < q");
  if (2 * N > table.limit()) throw domain_error("count_theorem2: 2N exceeds table limit");
  Theorem2Setup s{q.value(), m.value(), {}, std::vector<u64>(q.value(), 0)};
  const auto& pr = table.primes();
  for (auto it = std::upper_bound(pr.begin(), pr.end(), N); it != pr.end() && *it <= 2 * N; ++it) {
    s.primes.push_back(*it);
    ++s.v[*it % s.q];
  }
  return s;
}

inline u64 theorem2_target(const Theorem2Setup& s, u64 p1) {
  const u64 r = p1 % s.q;
  const u64 inv = reduce(egcd(static_cast<i64>(r), static_cast<i64>(s.q)).u, s.q);
  return submod(mulmod(s.m, inv, s.q), r, s.q);
}

}  // namespace detail

/// Number of prime triples p1, p2, p3 in (N, 2N] with
/// p1 (p1 + p2 + p3) = m (mod q). Any residue m is accepted.
inline Theorem2Result count_theorem2(const Modulus& q, const Residue& m, u64 N, const PrimeTable& table,
                                     ConvMethod method = ConvMethod::automatic) {
  const auto s = detail::theorem2_setup(q, m, N, table);
  const u64 pi1 = s.primes.size();
  const std::vector<u64> conv = cyclic_convolve(s.v, s.v, method);
  u128 count = 0;
  for (u64 p1 : s.primes) {
    if (p1 % s.q == 0) {
      if (s.m == 0) count += static_cast<u128>(pi1) * pi1;
      continue;
    }
    count += conv[detail::theorem2_target(s, p1)];
  }
  if (count > UINT64_MAX) throw domain_error("count_theorem2: count exceeds 64 bits");
  Theorem2Result r;
  r.count = static_cast<u64>(count);
  r.pi1 = pi1;
  if (pi1 <= kTheorem2BruteLimit) {
    u64 brute = 0;
    for (u64 p1 : s.primes) {
      for (u64 p2 : s.primes) {
        for (u64 p3 : s.primes) {
          if (mulmod(p1 % s.q, (p1 + p2 + p3) % s.q, s.q) == s.m) ++brute;
        }
      }
    }
    r.brute = brute;
    if (brute != r.count) {
      throw inconsistency("count_theorem2: convolution " + std::to_string(r.count) +
                          " != triple loop " + std::to_string(brute));
    }
  }
  const double p = static_cast<double>(pi1);
  r.main_term = p * p * p / static_cast<double>(s.q);
  r.remainder = static_cast<double>(r.count) - r.main_term;
  r.delta = r.main_term > 0 ? (r.main_term - static_cast<double>(r.count)) / r.main_term : 0.0;
  return r;
}

/// A verified solution of the count_theorem2 congruence, if one exists.
inline std::optional<CongruenceWitness> find_witness_theorem2(const Modulus& q, const Residue& m, u64 N,
                                                              const PrimeTable& table) {
  const auto s = detail::theorem2_setup(q, m, N, table);
  const std::vector<u64> conv = cyclic_convolve(s.v, s.v);
  auto check = [&](u64 p1, u64 p2, u64 p3) -> std::optional<CongruenceWitness> {
    const u64 res = mulmod(p1 % s.q, (p1 + p2 + p3) % s.q, s.q);
    if (res != s.m) throw inconsistency("find_witness_theorem2: reconstructed triple fails the congruence");
    return CongruenceWitness{{p1, p2, p3}, res};
  };
  for (u64 p1 : s.primes) {
    if (p1 % s.q == 0) {
      if (s.m == 0) return check(p1, s.primes.front(), s.primes.front());
      continue;
    }
    const u64 t = detail::theorem2_target(s, p1);
    if (conv[t] == 0) continue;
    for (u64 p2 : s.primes) {
      const u64 want = submod(t, p2 % s.q, s.q);
      if (s.v[want] == 0) continue;
      for (u64 p3 : s.primes) {
        if (p3 % s.q == want) return check(p1, p2, p3);
      }
    }
    throw inconsistency("find_witness_theorem2: nonzero convolution cell without a witness");
  }
  return std::nullopt;
}

struct Theorem3Result {
  u64 count = 0;
  std::optional<u64> brute;  ///< k-fold enumeration, when pi_star^k is small
  u64 pi_star = 0;           ///< primes p <= N not dividing q
  double main_term = 0.0;    ///< pi_star^k / q
  double delta = 0.0;        ///< (main_term - count) / main_term
  bool main_term_applies = true;  ///< false for composite q
};

inline constexpr u64 kTheorem3BruteLimit = 200'000;

namespace detail {

struct Theorem3Setup {
  u64 q;
  std::vector<u64> primes;  ///< usable primes
  std::vector<u64> g;       ///< g(p) = a inv(p) + b p mod q, aligned with primes
  std::vector<u64> d;       ///< distribution of g
};

inline Theorem3Setup theorem3_setup(const Modulus& q, const Residue& a, const Residue& b, int k,
                                    const Residue& m, u64 N, const PrimeTable& table) {
  require_same_modulus(a, q, "count_theorem3");
  require_same_modulus(b, q, "count_theorem3");
  require_same_modulus(m, q, "count_theorem3");
  const u64 Q = q.value();
  if (gcd(mulmod(a.value(), b.value(), Q), Q) != 1) throw domain_error("count_theorem3: gcd(ab, q) != 1");
  if (k < 1) throw domain_error("count_theorem3: k must be >= 1");
  if (N > table.limit()) throw domain_error("count_theorem3: N exceeds table limit");
  const KloostermanContext ctx(q);
  Theorem3Setup s{Q, {}, {}, std::vector<u64>(Q, 0)};
  const auto& pr = table.primes();
  for (auto it = pr.begin(); it != pr.end() && *it <= N; ++it) {
    const u64 r = *it % Q;
    if (gcd(r, Q) != 1) continue;
    const u64 gv = addmod(mulmod(a.value(), ctx.inverse(r), Q), mulmod(b.value(), r, Q), Q);
    s.primes.push_back(*it);
    s.g.push_back(gv);
    ++s.d[gv];
  }
  return s;
}

inline u128 ipow128(u64 base, int k) {
  u128 r = 1;
  for (int i = 0; i < k; ++i) {
    r *= base;
    if (r > UINT64_MAX) throw domain_error("count_theorem3: pi*(N)^k exceeds 64 bits");
  }
  return r;
}

}  // namespace detail

/// Number of k-tuples of primes p_i <= N, p_i not dividing q, with
/// g(p_1) + ... + g(p_k) = m (mod q), g(p) = a inv(p) + b p.
inline Theorem3Result count_theorem3(const Modulus& q, const Residue& a, const Residue& b, int k,
                                     const Residue& m, u64 N, const PrimeTable& table,
                                     ConvMethod method = ConvMethod::automatic) {
  const auto s = detail::theorem3_setup(q, a, b, k, m, N, table);
  const u64 ps = s.primes.size();
  const u128 mass = detail::ipow128(ps, k);
  Theorem3Result r;
  r.pi_star = ps;
  r.count = convolution_power(s.d, k, method)[m.value()];
  if (mass <= kTheorem3BruteLimit) {
    u64 brute = 0;
    std::vector<std::size_t> idx(k, 0);
    if (ps > 0) {
      for (;;) {
        u64 sum = 0;
        for (int i = 0; i < k; ++i) sum = addmod(sum, s.g[idx[i]], s.q);
        if (sum == m.value()) ++brute;
        int pos = 0;
        while (pos < k && ++idx[pos] == ps) idx[pos++] = 0;
        if (pos == k) break;
      }
    }
    r.brute = brute;
    if (brute != r.count) {
      throw inconsistency("count_theorem3: convolution " + std::to_string(r.count) +
                          " != enumeration " + std::to_string(brute));
    }
  }
  r.main_term = std::pow(static_cast<double>(ps), k) / static_cast<double>(s.q);
  r.delta = r.main_term > 0 ? (r.main_term - static_cast<double>(r.count)) / r.main_term : 0.0;
  r.main_term_applies = q.is_prime();
  return r;
}

/// A verified solution of the count_theorem3 congruence, found by descending
/// through the partial convolutions d^(*j).
inline std::optional<CongruenceWitness> find_witness_theorem3(const Modulus& q, const Residue& a,
                                                              const Residue& b, int k, const Residue& m,
                                                              u64 N, const PrimeTable& table) {
  const auto s = detail::theorem3_setup(q, a, b, k, m, N, table);
  detail::ipow128(s.primes.size(), k);
  std::vector<std::vector<u64>> partial{s.d};  // partial[j] = d^(*(j+1))
  for (int j = 1; j < k; ++j) partial.push_back(cyclic_convolve(partial.back(), s.d));
  if (partial[k - 1][m.value()] == 0) return std::nullopt;
  CongruenceWitness w;
  u64 t = m.value();
  for (int i = k; i >= 2; --i) {
    bool found = false;
    for (std::size_t j = 0; j < s.primes.size() && !found; ++j) {
      const u64 rest = submod(t, s.g[j], s.q);
      if (partial[i - 2][rest] > 0) {
        w.primes.push_back(s.primes[j]);
        t = rest;
        found = true;
      }
    }
    if (!found) throw inconsistency("find_witness_theorem3: descent lost the witness");
  }
  for (std::size_t j = 0; j < s.primes.size(); ++j) {
    if (s.g[j] == t) {
      w.primes.push_back(s.primes[j]);
      break;
    }
  }
  if (static_cast<int>(w.primes.size()) != k) throw inconsistency("find_witness_theorem3: incomplete tuple");
  const KloostermanContext ctx(q);
  u64 sum = 0;
  for (u64 p : w.primes) {
    const u64 r = p % s.q;
    sum = addmod(sum, addmod(mulmod(a.value(), ctx.inverse(r), s.q), mulmod(b.value(), r, s.q), s.q), s.q);
  }
  if (sum != m.value()) throw inconsistency("find_witness_theorem3: tuple fails the congruence");
  w.residual = sum;
  return w;
}

}  // namespace kloos
