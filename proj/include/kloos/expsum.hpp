#pragma once

// Exponential sums modulo q: complete and incomplete Kloosterman sums, sums
// over primes and prime powers, bilinear double sums and sums of a rational
// function over primes.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kloos/arith.hpp"
#include "kloos/complex_sum.hpp"
#include "kloos/tables.hpp"

namespace kloos {

inline constexpr long double kTwoPiL = 6.283185307179586476925286766559005768L;

/// e_q(r) = exp(2 pi i r / q) for r in [0, q). The phase is taken from the
/// representative of r in (-q/2, q/2], so e_q(q - r) is the exact conjugate
/// of e_q(r).
inline std::complex<double> unit_root(u64 r, u64 q) {
  if (r == 0) return {1.0, 0.0};
  if (2 * r == q) return {-1.0, 0.0};
  const long double s = r <= q / 2 ? static_cast<long double>(r)
                                   : -static_cast<long double>(q - r);
  const long double angle = kTwoPiL * s / static_cast<long double>(q);
  return {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
}

/// Per-modulus lookup tables shared by all sums modulo q: residue inverses
/// (0 for non-units) and the values e_q(r). Tables are only built below the
/// size thresholds; above them everything is computed on the fly.
class KloostermanContext {
 public:
  static constexpr u64 kInverseTableLimit = u64{1} << 22;
  static constexpr u64 kPhaseTableLimit = u64{1} << 20;

  explicit KloostermanContext(const Modulus& q) : q_(q) {
    const u64 m = q.value();
    if (m <= kInverseTableLimit) {
      std::vector<u64> units;
      units.reserve(q.phi());
      for (u64 r = 1; r < m; ++r) {
        if (gcd(r, m) == 1) units.push_back(r);
      }
      std::vector<u64> inv = units;
      batch_modinv_inplace(inv, m);
      inverse_.assign(m, 0);
      for (std::size_t i = 0; i < units.size(); ++i) inverse_[units[i]] = static_cast<std::uint32_t>(inv[i]);
    }
    if (m <= kPhaseTableLimit) {
      phase_.resize(m);
      for (u64 r = 0; r < m; ++r) phase_[r] = unit_root(r, m);
    }
  }

  const Modulus& modulus() const noexcept { return q_; }
  u64 q() const noexcept { return q_.value(); }

  std::complex<double> phase(u64 r) const {
    return phase_.empty() ? unit_root(r, q_.value()) : phase_[r];
  }

  /// Inverse of r (reduced mod q), or 0 when r is not a unit.
  u64 inverse(u64 r) const {
    if (!inverse_.empty()) return inverse_[r];
    if (r == 0 || gcd(r, q_.value()) != 1) return 0;
    return reduce(egcd(static_cast<i64>(r), static_cast<i64>(q_.value())).u, q_.value());
  }

  /// Fills out[i] with the inverse of values[i] mod q, or 0 when values[i]
  /// is not a unit. values must already be reduced mod q.
  void inverses(std::span<const u64> values, std::span<u64> out) const {
    const u64 m = q_.value();
    if (!inverse_.empty()) {
      for (std::size_t i = 0; i < values.size(); ++i) out[i] = inverse_[values[i]];
      return;
    }
    std::vector<u64> units;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] != 0 && gcd(values[i], m) == 1) {
        units.push_back(values[i]);
        where.push_back(i);
      } else {
        out[i] = 0;
      }
    }
    batch_modinv_inplace(units, m);
    for (std::size_t j = 0; j < units.size(); ++j) out[where[j]] = units[j];
  }

 private:
  Modulus q_;
  std::vector<std::uint32_t> inverse_;
  std::vector<std::complex<double>> phase_;
};

enum class Weight { unit_over_primes, mangoldt, unit_over_integers };

inline const char* to_string(Weight w) {
  switch (w) {
    case Weight::unit_over_primes: return "unit-over-primes";
    case Weight::mangoldt: return "mangoldt";
    case Weight::unit_over_integers: return "unit-over-integers";
  }
  return "?";
}

/// Inputs of a Kloosterman-type sum: modulus, the two coefficients a, b, the
/// range limit X and the weight.
struct SumSpec {
  Modulus q;
  Residue a;
  Residue b;
  u64 X;
  Weight weight;
};

namespace detail {

inline void require_same_modulus(const Residue& r, const Modulus& q, const char* what) {
  if (r.modulus() != q.value()) {
    throw domain_error(std::string(what) + ": residue modulus " + std::to_string(r.modulus()) +
                       " does not match q = " + std::to_string(q.value()));
  }
}

inline void require_units(const SumSpec& s, const char* what) {
  require_same_modulus(s.a, s.q, what);
  require_same_modulus(s.b, s.q, what);
  const u64 m = s.q.value();
  if (gcd(mulmod(s.a.value(), s.b.value(), m), m) != 1) {
    throw domain_error(std::string(what) + ": gcd(ab, q) != 1");
  }
}

/// Core loop: sum over positions [lo, hi) of w * e_q(a * inv(n) + b * n),
/// where `at(i)` yields (n, w) and terms with w == 0 or gcd(n, q) > 1 are
/// skipped. Coefficients a, b are residues mod q.
template <typename At>
void kloosterman_chunk(const KloostermanContext& ctx, u64 a, u64 b, std::size_t lo, std::size_t hi,
                       At&& at, CompensatedSum& acc) {
  const u64 m = ctx.q();
  std::vector<u64> ns;
  std::vector<double> ws;
  ns.reserve(hi - lo);
  ws.reserve(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    auto [n, w] = at(i);
    if (w == 0.0) continue;
    ns.push_back(n % m);
    ws.push_back(w);
  }
  std::vector<u64> inv(ns.size());
  ctx.inverses(ns, inv);
  for (std::size_t j = 0; j < ns.size(); ++j) {
    if (inv[j] == 0) continue;
    const u64 r = addmod(mulmod(a, inv[j], m), mulmod(b, ns[j], m), m);
    const std::complex<double> e = ctx.phase(r);
    acc.add(ws[j] * e.real(), ws[j] * e.imag(), std::abs(ws[j]));
  }
}

/// Sum of w(n) e_q(a inv(n) + b n) over lo <= n <= hi, (n, q) = 1.
template <typename WeightFn>
ComplexSum twisted_range_sum(const KloostermanContext& ctx, u64 a, u64 b, u64 lo, u64 hi,
                             WeightFn&& w, bool parallel = true) {
  if (hi < lo) return {};
  const std::size_t count = hi - lo + 1;
  return chunked_sum(
      count,
      [&](std::size_t i0, std::size_t i1, CompensatedSum& acc) {
        kloosterman_chunk(
            ctx, a, b, i0, i1,
            [&](std::size_t i) {
              const u64 n = lo + i;
              return std::pair<u64, double>{n, w(n)};
            },
            acc);
      },
      parallel);
}

inline void require_limit(u64 X, const PrimeTable& table, const char* what) {
  if (X > table.limit()) {
    throw domain_error(std::string(what) + ": X = " + std::to_string(X) +
                       " exceeds table limit " + std::to_string(table.limit()));
  }
}

}  // namespace detail

/// Complete sum over n in [1, q], (n, q) = 1, of e_q(a inv(n) + b n).
inline ComplexSum complete_sum(const KloostermanContext& ctx, const Residue& a, const Residue& b) {
  detail::require_same_modulus(a, ctx.modulus(), "complete_sum");
  detail::require_same_modulus(b, ctx.modulus(), "complete_sum");
  return detail::twisted_range_sum(ctx, a.value(), b.value(), 1, ctx.q(), [](u64) { return 1.0; });
}

inline ComplexSum complete_sum(const Residue& a, const Residue& b, const Modulus& q) {
  return complete_sum(KloostermanContext(q), a, b);
}

/// Incomplete sum over n in [1, N], (n, q) = 1, 1 <= N <= q.
inline ComplexSum incomplete_sum(const KloostermanContext& ctx, const Residue& a, const Residue& b,
                                 u64 N) {
  detail::require_same_modulus(a, ctx.modulus(), "incomplete_sum");
  detail::require_same_modulus(b, ctx.modulus(), "incomplete_sum");
  if (N < 1 || N > ctx.q()) {
    throw domain_error("incomplete_sum: N = " + std::to_string(N) + " outside [1, q]");
  }
  return detail::twisted_range_sum(ctx, a.value(), b.value(), 1, N, [](u64) { return 1.0; });
}

inline ComplexSum incomplete_sum(const Residue& a, const Residue& b, const Modulus& q, u64 N) {
  return incomplete_sum(KloostermanContext(q), a, b, N);
}

/// W_q(a, b; X): sum over primes p <= X, p not dividing q.
inline ComplexSum prime_sum(const KloostermanContext& ctx, const SumSpec& spec,
                            const PrimeTable& table) {
  detail::require_units(spec, "prime_sum");
  detail::require_limit(spec.X, table, "prime_sum");
  const auto& primes = table.primes();
  const std::size_t count = spec.X < 2 ? 0 : pi(table, spec.X);
  return chunked_sum(count, [&](std::size_t lo, std::size_t hi, CompensatedSum& acc) {
    detail::kloosterman_chunk(
        ctx, spec.a.value(), spec.b.value(), lo, hi,
        [&](std::size_t i) { return std::pair<u64, double>{primes[i], 1.0}; }, acc);
  });
}

inline ComplexSum prime_sum(const SumSpec& spec, const PrimeTable& table) {
  return prime_sum(KloostermanContext(spec.q), spec, table);
}

/// T_q(a, b; X): sum over n <= X, (n, q) = 1, of Lambda(n) e_q(a inv(n) + b n).
inline ComplexSum lambda_sum(const KloostermanContext& ctx, const SumSpec& spec,
                             const PrimeTable& table) {
  detail::require_units(spec, "lambda_sum");
  detail::require_limit(spec.X, table, "lambda_sum");
  if (spec.X < 2) return {};
  return detail::twisted_range_sum(ctx, spec.a.value(), spec.b.value(), 1, spec.X,
                                   [&](u64 n) { return table.mangoldt(n); });
}

inline ComplexSum lambda_sum(const SumSpec& spec, const PrimeTable& table) {
  return lambda_sum(KloostermanContext(spec.q), spec, table);
}

/// Sum over all n <= X, (n, q) = 1 (X may exceed q).
inline ComplexSum integer_sum(const KloostermanContext& ctx, const SumSpec& spec) {
  detail::require_same_modulus(spec.a, spec.q, "integer_sum");
  detail::require_same_modulus(spec.b, spec.q, "integer_sum");
  return detail::twisted_range_sum(ctx, spec.a.value(), spec.b.value(), 1, spec.X,
                                   [](u64) { return 1.0; });
}

/// Dispatches on spec.weight.
inline ComplexSum weighted_sum(const KloostermanContext& ctx, const SumSpec& spec,
                               const PrimeTable& table) {
  switch (spec.weight) {
    case Weight::unit_over_primes: return prime_sum(ctx, spec, table);
    case Weight::mangoldt: return lambda_sum(ctx, spec, table);
    case Weight::unit_over_integers: return integer_sum(ctx, spec);
  }
  throw domain_error("weighted_sum: unknown weight");
}

/// Real coefficients on the integer range (start, start + values.size()].
struct CoefficientMap {
  u64 start = 0;
  std::vector<double> values;

  u64 first() const noexcept { return start + 1; }
  u64 last() const noexcept { return start + values.size(); }
  double at(u64 n) const { return values[n - start - 1]; }
};

/// C or S(M, N): sum over m in alpha's range and n in beta's range, both
/// coprime to q, of alpha_m beta_n e_q(a inv(mn) + b mn), restricted to
/// mn <= cap when a cap is given. Evaluated as an outer sum over m of
/// twisted inner sums over n; the m-blocks are independent.
inline ComplexSum bilinear_sum(const KloostermanContext& ctx, const CoefficientMap& alpha,
                               const CoefficientMap& beta, const Residue& a, const Residue& b,
                               std::optional<u64> cap = std::nullopt) {
  detail::require_same_modulus(a, ctx.modulus(), "bilinear_sum");
  detail::require_same_modulus(b, ctx.modulus(), "bilinear_sum");
  for (double v : alpha.values) {
    if (!std::isfinite(v)) throw domain_error("bilinear_sum: non-finite alpha coefficient");
  }
  for (double v : beta.values) {
    if (!std::isfinite(v)) throw domain_error("bilinear_sum: non-finite beta coefficient");
  }
  const u64 m = ctx.q();
  std::vector<ComplexSum> inner(alpha.values.size());
  parallel_for(alpha.values.size(), [&](std::size_t i) {
    const u64 mm = alpha.first() + i;
    if (alpha.values[i] == 0.0 || gcd(mm % m, m) != 1) return;
    u64 hi = beta.last();
    if (cap) hi = std::min<u64>(hi, *cap / mm);
    if (hi < beta.first()) return;
    const u64 a2 = mulmod(a.value(), ctx.inverse(mm % m), m);
    const u64 b2 = mulmod(b.value(), mm % m, m);
    inner[i] = detail::twisted_range_sum(
        ctx, a2, b2, beta.first(), hi, [&](u64 n) { return beta.at(n); }, false);
  });
  CompensatedSum outer;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i].terms == 0) continue;
    outer.add_scaled(alpha.values[i], inner[i]);
  }
  return outer.finish();
}

inline ComplexSum bilinear_sum(const CoefficientMap& alpha, const CoefficientMap& beta,
                               const Residue& a, const Residue& b, const Modulus& q,
                               std::optional<u64> cap = std::nullopt) {
  return bilinear_sum(KloostermanContext(q), alpha, beta, a, b, cap);
}

struct RationalSumResult {
  ComplexSum sum;
  u64 skipped = 0;  ///< primes p <= X, p not dividing q, with Q(p) not a unit
};

/// Horner evaluation of sum coeffs[i] x^i modulo m.
inline u64 eval_poly_mod(std::span<const i64> coeffs, u64 x, u64 m) {
  u64 acc = 0;
  x %= m;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = addmod(mulmod(acc, x, m), reduce(coeffs[i], m), m);
  return acc;
}

/// W_q(f; X) for f = P / Q: sum over primes p <= X, p not dividing q, of
/// e_q(P(p) inv(Q(p))). Coefficients are listed constant term first.
inline RationalSumResult rational_sum(std::span<const i64> P, std::span<const i64> Q,
                                      const Modulus& q, u64 X, const PrimeTable& table) {
  detail::require_limit(X, table, "rational_sum");
  const KloostermanContext ctx(q);
  const u64 m = q.value();
  const auto& primes = table.primes();
  const std::size_t count = X < 2 ? 0 : pi(table, X);
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  std::vector<u64> skipped(std::max<std::size_t>(chunks, 1), 0);
  RationalSumResult out;
  out.sum = chunked_sum(count, [&](std::size_t lo, std::size_t hi, CompensatedSum& acc) {
    std::vector<u64> num, den;
    u64 skip = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const u64 p = primes[i];
      if (gcd(p % m, m) != 1) continue;
      const u64 d = eval_poly_mod(Q, p, m);
      if (d == 0 || gcd(d, m) != 1) {
        ++skip;
        continue;
      }
      num.push_back(eval_poly_mod(P, p, m));
      den.push_back(d);
    }
    std::vector<u64> inv(den.size());
    ctx.inverses(den, inv);
    for (std::size_t j = 0; j < num.size(); ++j) {
      const std::complex<double> e = ctx.phase(mulmod(num[j], inv[j], m));
      acc.add(e.real(), e.imag(), 1.0);
    }
    skipped[lo / kChunkSize] = skip;
  });
  for (u64 s : skipped) out.skipped += s;
  return out;
}

}  // namespace kloos
