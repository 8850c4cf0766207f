#include <gtest/gtest.h>

#include <random>

#include "kloos/vaughan.hpp"
#include "oracles.hpp"

using namespace kloos;

namespace {

const PrimeTable& table() {
  static const PrimeTable t = sieve(200000);
  return t;
}

double oracle_a(u64 m, double V) {
  double s = 0;
  for (u64 k = 1; k <= m; ++k)
    if (m % k == 0 && k <= V && m / k <= V) s += oracle::moebius(k) * oracle::mangoldt(m / k);
  return s;
}

i64 oracle_b(u64 m, double V) {
  i64 s = 0;
  for (u64 d = 1; d <= m && d <= V; ++d)
    if (m % d == 0) s += oracle::moebius(d);
  return s;
}

SumSpec spec(i64 q, i64 a, i64 b, u64 X) {
  const Modulus m = factorize(q);
  return {m, Residue(a, m), Residue(b, m), X, Weight::mangoldt};
}

}  // namespace

TEST(Vaughan, CoefficientExamples) {
  const auto& t = table();
  EXPECT_NEAR(coeff_a(2, 3, t), std::log(2.0), 1e-15);
  EXPECT_NEAR(coeff_a(4, 3, t), -std::log(2.0), 1e-15);
  EXPECT_NEAR(coeff_a(6, 3, t), -std::log(6.0), 1e-15);
  EXPECT_EQ(coeff_b(6, 3, t), -1);
  EXPECT_EQ(coeff_b(4, 3, t), 0);
  for (u64 m = 2; m < 300; ++m) EXPECT_EQ(coeff_b(m, static_cast<double>(m) + 0.5, t), 0);
  EXPECT_NEAR(coefficient_of(5, 3, 100, t), std::log(5.0), 1e-12);
  EXPECT_NEAR(coefficient_of(6, 3, 100, t), 0.0, 1e-12);
  EXPECT_NEAR(coefficient_of(9, 3, 100, t), std::log(3.0), 1e-12);
  EXPECT_THROW(coeff_a(0, 3, t), domain_error);
  EXPECT_THROW(coefficient_of(101, 3, 100, t), domain_error);
}

TEST(Vaughan, CoefficientsMatchOracle) {
  for (double V : {2.5, 3.0, 7.3, 10.0, 31.6}) {
    for (u64 m = 1; m <= 1500; ++m) {
      ASSERT_NEAR(coeff_a(m, V, table()), oracle_a(m, V), 1e-12) << m << " " << V;
      ASSERT_EQ(coeff_b(m, V, table()), oracle_b(m, V)) << m << " " << V;
    }
  }
}

TEST(Vaughan, CoefficientIdentity) {
  for (auto [X, V] : std::vector<std::pair<u64, double>>{{10000, 10}, {20000, 30}, {5000, 7.5}}) {
    const auto c = coefficient_table(V, X, table());
    for (u64 n = 1; n <= X; ++n) {
      if (n <= 400) {
        ASSERT_NEAR(c[n], coefficient_of(n, V, X, table()), 1e-9) << n;
      }
      if (static_cast<double>(n) > V) {
        ASSERT_LE(std::abs(c[n] - oracle::mangoldt(n)), 1e-9 * (1 + std::log(double(n)))) << n;
      }
    }
  }
}

TEST(Vaughan, CutoffsAreExact) {
  const VaughanCutoffs c(10.0, 10000);
  EXPECT_EQ(c.v, 10u);
  EXPECT_EQ(c.v2, 100u);
  EXPECT_EQ(c.x_over_v, 1000u);
  const VaughanCutoffs d(std::sqrt(2.0), 100);
  EXPECT_EQ(d.v, 1u);
  EXPECT_EQ(d.x_over_v, 70u);
}

TEST(Vaughan, RemainderExample) {
  const auto sp = spec(101, 1, 1, 500);
  const VaughanParams p{5.0, 0.0, Regime::manual};
  const auto d = decompose(sp, p, table());
  const auto r = remainder_on_support(sp, p, table());
  EXPECT_NEAR(d.remainder.re, r.re, 1e-9);
  EXPECT_NEAR(d.remainder.im, r.im, 1e-9);
}

TEST(Vaughan, PartsMatchOracle) {
  const u64 q = 97, a = 5, b = 11, X = 3000;
  const double V = 6.5;
  const auto d = decompose(spec(q, a, b, X), {V, 0, Regime::manual}, table());
  auto divisor_weight = [&](auto&& f) {
    return [&, f](u64 n) {
      double s = 0;
      for (u64 m = 1; m <= n; ++m)
        if (n % m == 0) s += f(m, n / m);
      return s;
    };
  };
  const auto S1 = oracle::kloosterman(a, b, q, 1, X, divisor_weight([&](u64 m, u64 k) {
    return m <= V ? oracle::moebius(m) * std::log(double(k)) : 0.0;
  }));
  const auto S2 = oracle::kloosterman(a, b, q, 1, X, divisor_weight([&](u64 m, u64) {
    return m <= V ? oracle_a(m, V) : 0.0;
  }));
  const auto S3 = oracle::kloosterman(a, b, q, 1, X, divisor_weight([&](u64 m, u64) {
    return m > V && m <= V * V ? oracle_a(m, V) : 0.0;
  }));
  const auto S4 = oracle::kloosterman(a, b, q, 1, X, divisor_weight([&](u64 m, u64 k) {
    return m > V && m * V <= X && k > V ? oracle_b(m, V) * oracle::mangoldt(k) : 0.0;
  }));
  for (auto [got, want] : {std::pair{d.S1, S1}, {d.S2, S2}, {d.S3, S3}, {d.S4, S4}}) {
    EXPECT_NEAR(got.re, want.real(), 1e-8);
    EXPECT_NEAR(got.im, want.imag(), 1e-8);
  }
}

TEST(Vaughan, RemainderSupportRandom) {
  std::mt19937_64 rng(61);
  const i64 moduli[] = {101, 1009, 10007, 1000, 4096, 3 * 5 * 7 * 11 * 13};
  for (i64 q : moduli) {
    for (int i = 0; i < 3; ++i) {
      i64 a, b;
      do {
        a = 1 + static_cast<i64>(rng() % static_cast<u64>(q - 1));
        b = 1 + static_cast<i64>(rng() % static_cast<u64>(q - 1));
      } while (oracle::gcd(static_cast<u64>(a * b % q), static_cast<u64>(q)) != 1);
      const u64 X = 2000 + rng() % 40000;
      const double V = 2.0 + std::uniform_real_distribution<>(0, 40)(rng);
      const auto sp = spec(q, a, b, X);
      const VaughanParams p{V, 0, Regime::manual};
      const auto d = decompose(sp, p, table());
      const auto r = remainder_on_support(sp, p, table());
      const double tol = d.remainder.err + r.err;
      EXPECT_LE(std::abs(d.remainder.value() - r.value()), tol) << q << " " << X << " " << V;
    }
  }
}

TEST(Vaughan, DegenerateS4) {
  const auto d = decompose(spec(101, 2, 3, 90), {10.0, 0, Regime::manual}, table());
  EXPECT_EQ(d.S4.terms, 0u);
  EXPECT_EQ(d.S4.abs(), 0.0);
}

TEST(Vaughan, ParameterErrors) {
  const auto sp = spec(1009, 2, 3, 5000);
  EXPECT_THROW(decompose(sp, {1.0, 0, Regime::manual}, table()), domain_error);
  try {
    decompose(sp, {100.0, 0, Regime::long_range}, table());
    FAIL();
  } catch (const domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("V < sqrt(X)"), std::string::npos);
  }
  try {
    decompose(sp, {5.0, 0, Regime::long_range}, table());
    FAIL();
  } catch (const domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("X/V <= q/2"), std::string::npos);
  }
}

TEST(Vaughan, ChooseParamsExamples) {
  const Modulus q = factorize(1000000);
  const auto p = choose_params(q, std::pow(1e6, 0.875));
  EXPECT_EQ(p.regime, Regime::long_range);
  EXPECT_NEAR(p.D, std::pow(10.0, 36.0 / 7.0), 1e-6 * p.D);
  EXPECT_NEAR(p.D, 1.3895e5, 10.0);
  EXPECT_NEAR(p.V, 51.8, 0.05);
  const auto s = choose_params(q, std::pow(1e6, 0.75));
  EXPECT_EQ(s.regime, Regime::short_range);
  EXPECT_NEAR(s.D, std::pow(1e6, 3.0 / 28.0) * std::pow(std::pow(1e6, 0.75), 6.0 / 7.0), 1e-6 * s.D);
  const double Xmax = std::pow(5e5, 1.5);
  const auto t = choose_params(q, Xmax);
  EXPECT_EQ(t.regime, Regime::tail);
  EXPECT_LE(Xmax / t.V, 5e5);
  EXPECT_NEAR(t.V, 2 * Xmax / 1e6, 1e-9 * t.V);
  EXPECT_THROW(choose_params(q, 100.0), domain_error);
  EXPECT_THROW(choose_params(q, 1e9), domain_error);
}

TEST(Vaughan, ChooseParamsPostconditions) {
  std::mt19937_64 rng(67);
  for (int i = 0; i < 2000; ++i) {
    const double lq = std::uniform_real_distribution<>(std::log(100.0), std::log(1e15))(rng);
    const Modulus q = factorize(static_cast<i64>(std::exp(lq)));
    const double qd = static_cast<double>(q.value());
    const double lo = 0.75 * std::log(qd), hi = 1.5 * std::log(qd / 2);
    const double X = std::exp(std::uniform_real_distribution<>(lo, hi)(rng));
    const auto p = choose_params(q, X);
    ASSERT_GT(p.V, 1.0);
    ASSERT_LT(p.V, std::sqrt(X));
    ASSERT_LE(X / p.V, qd / 2);
    ASSERT_GT(p.D, 0.0);
  }
}
