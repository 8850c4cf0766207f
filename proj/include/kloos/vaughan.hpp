#pragma once

// Vaughan's identity for T_q(X): coefficients, the four-sum decomposition
// with its exactly computed remainder, and the cutoff selection V, D.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "kloos/arith.hpp"
#include "kloos/complex_sum.hpp"
#include "kloos/expsum.hpp"
#include "kloos/tables.hpp"

namespace kloos {

enum class Regime {
  short_range,  ///< q^(3/4) <= X < q^(7/8):   D = q^(3/28) X^(6/7), V = D^(1/3)
  long_range,   ///< q^(7/8) <= X <= c1 q^(107/73): D = q^(2/35) X^(32/35), V = D^(1/3)
  tail,         ///< above that: V = 2X/q, D = q^(2/35) X^(32/35)
  manual,       ///< caller-supplied V
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::short_range: return "short-range";
    case Regime::long_range: return "long-range";
    case Regime::tail: return "tail";
    case Regime::manual: return "manual";
  }
  return "?";
}

struct VaughanParams {
  double V = 2.0;
  double D = 0.0;
  Regime regime = Regime::manual;
};

/// Integer cutoffs derived once from (V, X) and shared by every routine that
/// splits a range at V, V^2 or X/V, so all of them agree on boundary cases.
struct VaughanCutoffs {
  u64 v = 0;         ///< largest m with m <= V
  u64 v2 = 0;        ///< largest m with m <= V^2
  u64 x_over_v = 0;  ///< largest m with m * V <= X

  VaughanCutoffs(double V, u64 X) {
    v = static_cast<u64>(std::floor(V));
    v2 = static_cast<u64>(std::floor(V * V));
    const double Xd = static_cast<double>(X);
    x_over_v = static_cast<u64>(std::floor(Xd / V));
    while (static_cast<double>(x_over_v + 1) * V <= Xd) ++x_over_v;
    while (x_over_v > 0 && static_cast<double>(x_over_v) * V > Xd) --x_over_v;
  }
};

// ---------------------------------------------------------------------------
// Coefficients

namespace detail {
inline void require_table(u64 n, const PrimeTable& table, const char* what) {
  if (n > table.limit()) {
    throw domain_error(std::string(what) + ": " + std::to_string(n) + " exceeds table limit " +
                       std::to_string(table.limit()));
  }
}

inline std::vector<u64> divisors(u64 n) {
  std::vector<u64> small, large;
  for (u64 d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    small.push_back(d);
    if (d * d != n) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}
}  // namespace detail

/// a_m = sum over k l = m, k, l <= V, of mu(k) Lambda(l).
inline double coeff_a(u64 m, double V, const PrimeTable& table) {
  if (m < 1) throw domain_error("coeff_a: m must be >= 1");
  detail::require_table(m, table, "coeff_a");
  double sum = 0.0;
  for (u64 k : detail::divisors(m)) {
    const u64 l = m / k;
    if (static_cast<double>(k) <= V && static_cast<double>(l) <= V) {
      const int mu = table.moebius(k);
      if (mu != 0) sum += mu * table.mangoldt(l);
    }
  }
  return sum;
}

/// b_m = sum over d | m, d <= V, of mu(d).
inline i64 coeff_b(u64 m, double V, const PrimeTable& table) {
  if (m < 1) throw domain_error("coeff_b: m must be >= 1");
  detail::require_table(m, table, "coeff_b");
  i64 sum = 0;
  for (u64 d : detail::divisors(m)) {
    if (static_cast<double>(d) <= V) sum += table.moebius(d);
  }
  return sum;
}

/// Coefficient of e_q(a inv(n) + b n) in S1 - S2 - S3 - S4:
///   sum_{m | n, m <= V} mu(m) ln(n/m) - sum_{m | n, m <= V^2} a_m
///   - sum_{n = m k, V < m <= X/V, k > V} b_m Lambda(k).
/// Equals Lambda(n) for every V < n <= X.
inline double coefficient_of(u64 n, double V, u64 X, const PrimeTable& table) {
  if (n < 1 || n > X) throw domain_error("coefficient_of: n must lie in [1, X]");
  detail::require_table(n, table, "coefficient_of");
  const VaughanCutoffs cut(V, X);
  double c = 0.0;
  for (u64 m : detail::divisors(n)) {
    const u64 k = n / m;
    if (m <= cut.v) {
      const int mu = table.moebius(m);
      if (mu != 0) c += mu * std::log(static_cast<double>(k));
    }
    if (m <= cut.v2) c -= coeff_a(m, V, table);
    if (m > cut.v && m <= cut.x_over_v && k > cut.v) {
      c -= static_cast<double>(coeff_b(m, V, table)) * table.mangoldt(k);
    }
  }
  return c;
}

/// coefficient_of for every n in [0, X] at once (entry 0 unused), by sieving
/// each block over multiples.
inline std::vector<double> coefficient_table(double V, u64 X, const PrimeTable& table) {
  detail::require_table(X, table, "coefficient_table");
  const VaughanCutoffs cut(V, X);
  std::vector<double> c(X + 1, 0.0);
  for (u64 m = 1; m <= std::min(cut.v, X); ++m) {
    const int mu = table.moebius(m);
    if (mu == 0) continue;
    for (u64 k = 1; m * k <= X; ++k) c[m * k] += mu * std::log(static_cast<double>(k));
  }
  for (u64 m = 1; m <= std::min(cut.v2, X); ++m) {
    const double a = coeff_a(m, V, table);
    if (a == 0.0) continue;
    for (u64 n = m; n <= X; n += m) c[n] -= a;
  }
  for (u64 m = cut.v + 1; m <= cut.x_over_v; ++m) {
    const i64 b = coeff_b(m, V, table);
    if (b == 0) continue;
    for (u64 k = cut.v + 1; m * k <= X; ++k) c[m * k] -= static_cast<double>(b) * table.mangoldt(k);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Parameter selection

namespace detail {
inline constexpr double kEdgeSlack = 1e-12;

inline double exp_of(double log_value) { return std::exp(log_value); }
}  // namespace detail

/// Chooses (V, D) for q^(3/4) <= X <= (q/2)^(3/2). The returned parameters
/// satisfy 1 < V < sqrt(X) and X / V <= q / 2 in floating point.
inline VaughanParams choose_params(const Modulus& q, double X) {
  const double qd = static_cast<double>(q.value());
  const double lq = std::log(qd), lx = std::log(X);
  const double lo = 0.75 * lq, hi = 1.5 * std::log(qd / 2.0);
  if (!(X > 0) || lx < lo - detail::kEdgeSlack || lx > hi + detail::kEdgeSlack) {
    throw domain_error("choose_params: X must satisfy q^(3/4) <= X <= (q/2)^(3/2)");
  }
  auto admissible = [&](const VaughanParams& p) {
    return p.V > 1.0 && p.V < std::sqrt(X) && X / p.V <= qd / 2.0;
  };
  auto tail = [&] {
    VaughanParams p{2.0 * X / qd, detail::exp_of((2.0 * lq + 32.0 * lx) / 35.0), Regime::tail};
    while (X / p.V > qd / 2.0) p.V = std::nextafter(p.V, INFINITY);
    return p;
  };
  VaughanParams p;
  if (lx < 0.875 * lq) {
    p.D = detail::exp_of((3.0 * lq + 24.0 * lx) / 28.0);
    p.regime = Regime::short_range;
  } else {
    const double c1_log = -105.0 / 73.0 * std::log(2.0);
    if (lx > c1_log + 107.0 / 73.0 * lq) return tail();
    p.D = detail::exp_of((2.0 * lq + 32.0 * lx) / 35.0);
    p.regime = Regime::long_range;
  }
  p.V = std::cbrt(p.D);
  if (!admissible(p)) return tail();
  return p;
}

// ---------------------------------------------------------------------------
// Decomposition

struct Decomposition {
  ComplexSum T;
  ComplexSum S1, S2, S3, S4;
  /// T - (S1 - S2 - S3 - S4), computed as an exact difference.
  ComplexSum remainder;
  VaughanParams params;
};

namespace detail {

inline void check_params(const VaughanParams& p, u64 X, u64 q) {
  if (!(p.V > 1.0)) throw domain_error("decompose: violated 1 < V");
  if (p.regime == Regime::manual) return;
  if (!(p.V < std::sqrt(static_cast<double>(X)))) throw domain_error("decompose: violated V < sqrt(X)");
  if (!(static_cast<double>(X) / p.V <= static_cast<double>(q) / 2.0)) {
    throw domain_error("decompose: violated X/V <= q/2");
  }
}

/// sum over listed m (coprime to q) of coef_m * sum_{lo <= n <= X/m} w(n) e_q(a inv(mn) + b mn).
template <typename WeightFn>
ComplexSum type_one_sum(const KloostermanContext& ctx, u64 a, u64 b, const std::vector<u64>& ms,
                        const std::vector<double>& coefs, u64 X, WeightFn&& w) {
  const u64 m = ctx.q();
  std::vector<ComplexSum> inner(ms.size());
  parallel_for(ms.size(), [&](std::size_t i) {
    const u64 mm = ms[i] % m;
    inner[i] = twisted_range_sum(ctx, mulmod(a, ctx.inverse(mm), m), mulmod(b, mm, m), 1, X / ms[i],
                                 w, false);
  });
  CompensatedSum outer;
  for (std::size_t i = 0; i < ms.size(); ++i) outer.add_scaled(coefs[i], inner[i]);
  return outer.finish();
}

inline ComplexSum combine(std::initializer_list<std::pair<double, const ComplexSum*>> parts) {
  ComplexSum out;
  for (auto [sign, s] : parts) {
    out.re += sign * s->re;
    out.im += sign * s->im;
    out.err += s->err;
    out.terms += s->terms;
  }
  // Rounding of the final few additions.
  out.err += 4.0 * CompensatedSum::kEps * std::hypot(out.re, out.im) +
             4.0 * CompensatedSum::kEps * [&] {
               double m = 0.0;
               for (auto [sign, s] : parts) m += s->abs();
               return m;
             }();
  return out;
}

}  // namespace detail

/// T_q(X) = S1 - S2 - S3 - S4 + remainder with
///   S1 = sum_{m <= V} mu(m) sum_{n <= X/m} ln(n) e(...),
///   S2 = sum_{m <= V} a_m sum_{n <= X/m} e(...),
///   S3 = sum_{V < m <= V^2} a_m sum_{n <= X/m} e(...),
///   S4 = sum_{V < m <= X/V} b_m sum_{V < n <= X/m} Lambda(n) e(...),
/// every variable coprime to q.
inline Decomposition decompose(const SumSpec& spec, const VaughanParams& params,
                               const PrimeTable& table) {
  detail::require_units(spec, "decompose");
  detail::require_limit(spec.X, table, "decompose");
  detail::check_params(params, spec.X, spec.q.value());
  const u64 X = spec.X;
  const u64 q = spec.q.value();
  const u64 a = spec.a.value(), b = spec.b.value();
  const KloostermanContext ctx(spec.q);
  const VaughanCutoffs cut(params.V, X);

  Decomposition d;
  d.params = params;
  SumSpec lambda_spec = spec;
  lambda_spec.weight = Weight::mangoldt;
  d.T = lambda_sum(ctx, lambda_spec, table);

  std::vector<u64> ms;
  std::vector<double> coefs;
  for (u64 m = 1; m <= std::min(cut.v, X); ++m) {
    if (table.moebius(m) != 0 && gcd(m % q, q) == 1) {
      ms.push_back(m);
      coefs.push_back(table.moebius(m));
    }
  }
  d.S1 = detail::type_one_sum(ctx, a, b, ms, coefs, X, [](u64 n) { return std::log(static_cast<double>(n)); });

  auto a_block = [&](u64 lo, u64 hi) {
    std::vector<u64> mm;
    std::vector<double> cc;
    for (u64 m = lo; m <= std::min(hi, X); ++m) {
      if (gcd(m % q, q) != 1) continue;
      const double am = coeff_a(m, params.V, table);
      if (am == 0.0) continue;
      mm.push_back(m);
      cc.push_back(am);
    }
    return detail::type_one_sum(ctx, a, b, mm, cc, X, [](u64) { return 1.0; });
  };
  d.S2 = a_block(1, cut.v);
  d.S3 = a_block(cut.v + 1, cut.v2);

  if (cut.x_over_v > cut.v) {
    CoefficientMap alpha{cut.v, {}}, beta{cut.v, {}};
    for (u64 m = cut.v + 1; m <= cut.x_over_v; ++m) {
      alpha.values.push_back(static_cast<double>(coeff_b(m, params.V, table)));
      beta.values.push_back(table.mangoldt(m));
    }
    d.S4 = bilinear_sum(ctx, alpha, beta, spec.a, spec.b, X);
  }

  d.remainder = detail::combine({{1.0, &d.T}, {-1.0, &d.S1}, {1.0, &d.S2}, {1.0, &d.S3}, {1.0, &d.S4}});
  return d;
}

/// The remainder as predicted by its support on n <= V:
/// sum_{n <= V, (n, q) = 1} (Lambda(n) - c(n)) e_q(a inv(n) + b n).
inline ComplexSum remainder_on_support(const SumSpec& spec, const VaughanParams& params,
                                       const PrimeTable& table) {
  detail::require_units(spec, "remainder_on_support");
  const VaughanCutoffs cut(params.V, spec.X);
  const u64 top = std::min(cut.v, spec.X);
  const KloostermanContext ctx(spec.q);
  return detail::twisted_range_sum(ctx, spec.a.value(), spec.b.value(), 1, top, [&](u64 n) {
    return table.mangoldt(n) - coefficient_of(n, params.V, spec.X, table);
  });
}

}  // namespace kloos
