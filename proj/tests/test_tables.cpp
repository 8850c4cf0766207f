#include <gtest/gtest.h>

#include "kloos/tables.hpp"
#include "oracles.hpp"

using namespace kloos;

TEST(Tables, MatchesTrialDivision) {
  const PrimeTable t = sieve(10000);
  u64 count = 0;
  for (u64 n = 1; n <= 10000; ++n) {
    ASSERT_EQ(t.is_prime(n), oracle::is_prime(n)) << n;
    ASSERT_EQ(t.moebius(n), oracle::moebius(n)) << n;
    ASSERT_DOUBLE_EQ(t.mangoldt(n), oracle::mangoldt(n)) << n;
    count += oracle::is_prime(n);
  }
  EXPECT_EQ(t.primes().size(), count);
}

TEST(Tables, SegmentBoundaries) {
  // Crosses several 2^20 segments; spot-check near each boundary.
  const u64 limit = 3'500'000;
  const PrimeTable t = sieve(limit);
  for (u64 s = 1; s <= 3; ++s) {
    const u64 b = s << 20;
    for (u64 n = b - 50; n <= b + 50; ++n) {
      ASSERT_EQ(t.is_prime(n), oracle::is_prime(n)) << n;
      ASSERT_EQ(t.moebius(n), oracle::moebius(n)) << n;
      ASSERT_DOUBLE_EQ(t.mangoldt(n), oracle::mangoldt(n)) << n;
    }
  }
  for (u64 n = limit - 200; n <= limit; ++n) ASSERT_EQ(t.moebius(n), oracle::moebius(n)) << n;
  EXPECT_EQ(pi(t, 1000000), 78498u);
  EXPECT_EQ(t.prime_power_base(1u << 21), 2u);
  EXPECT_DOUBLE_EQ(t.mangoldt(3 * 3 * 3 * 3 * 3 * 3 * 3 * 3 * 3 * 3 * 3 * 3 * 3), std::log(3.0));
}

TEST(Tables, PrimeCounting) {
  const PrimeTable t = sieve(100000);
  EXPECT_EQ(pi(t, 10), 4u);
  EXPECT_EQ(pi(t, 100000), 9592u);
  for (u64 N = 1; 2 * N <= 100000; N += 97) EXPECT_EQ(pi1(t, N), pi(t, 2 * N) - pi(t, N));
  EXPECT_EQ(pi1(t, 3), 1u);  // (3, 6] holds only 5
}

TEST(Tables, Errors) {
  EXPECT_THROW(sieve(1), domain_error);
  EXPECT_THROW(sieve(kMaxSieveLimit + 1), domain_error);
  const PrimeTable t = sieve(100);
  EXPECT_THROW(t.mangoldt(0), domain_error);
  EXPECT_THROW(t.moebius(101), domain_error);
  EXPECT_THROW(pi1(t, 51), domain_error);
  EXPECT_THROW(pi(t, 101), domain_error);
}
