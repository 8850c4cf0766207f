#pragma once

// Sieved arithmetic tables on [1, X]: primes, von Mangoldt and Moebius.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kloos/arith.hpp"
#include "kloos/parallel.hpp"

namespace kloos {

inline constexpr u64 kMaxSieveLimit = 100'000'000;

class PrimeTable;
inline PrimeTable sieve(u64 limit);

/// Primes, Lambda(n) and mu(n) for 1 <= n <= limit. Immutable once built.
///
/// Lambda is stored as the base prime of each prime power (0 elsewhere) and
/// converted to log(p) on access, which keeps the table at 5 bytes per entry.
class PrimeTable {
 public:
  u64 limit() const noexcept { return limit_; }
  const std::vector<std::uint32_t>& primes() const noexcept { return primes_; }

  bool is_prime(u64 n) const {
    check(n);
    return n >= 2 && base_[n] == n;
  }
  /// p if n = p^k with k >= 1, else 0.
  u64 prime_power_base(u64 n) const {
    check(n);
    return base_[n];
  }
  double mangoldt(u64 n) const {
    check(n);
    return base_[n] == 0 ? 0.0 : std::log(static_cast<double>(base_[n]));
  }
  int moebius(u64 n) const {
    check(n);
    return moebius_[n];
  }

 private:
  friend PrimeTable sieve(u64 limit);

  void check(u64 n) const {
    if (n < 1 || n > limit_) {
      throw domain_error("PrimeTable: index " + std::to_string(n) + " outside [1, " +
                         std::to_string(limit_) + "]");
    }
  }

  u64 limit_ = 0;
  std::vector<std::uint32_t> primes_;
  std::vector<std::uint32_t> base_;
  std::vector<std::int8_t> moebius_;
};

namespace detail {

inline std::vector<std::uint32_t> small_primes(u64 limit) {
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint32_t> out;
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

inline u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline constexpr u64 kSegmentSize = u64{1} << 20;

}  // namespace detail

/// Builds the tables for [1, limit] with a segmented sieve over the primes
/// up to sqrt(limit). Segments are independent and may run in parallel.
inline PrimeTable sieve(u64 limit) {
  if (limit < 2 || limit > kMaxSieveLimit) {
    throw domain_error("sieve: limit must lie in [2, 10^8], got " + std::to_string(limit));
  }
  PrimeTable t;
  t.limit_ = limit;
  t.base_.assign(limit + 1, 0);
  t.moebius_.assign(limit + 1, 0);

  const u64 root = detail::isqrt(limit);
  const std::vector<std::uint32_t> base_primes = detail::small_primes(root);
  const std::size_t segments = (limit + detail::kSegmentSize) / detail::kSegmentSize;

  parallel_for(segments, [&](std::size_t s) {
    const u64 lo = std::max<u64>(1, s * detail::kSegmentSize);
    const u64 hi = std::min<u64>(limit, (s + 1) * detail::kSegmentSize - 1);
    if (lo > hi) return;
    const std::size_t len = hi - lo + 1;
    // rad[i] accumulates the product of small primes dividing lo + i.
    std::vector<std::uint32_t> rad(len, 1);
    std::vector<std::int8_t> mu(len, 1);
    for (std::uint32_t p : base_primes) {
      const u64 first = std::max<u64>(p, (lo + p - 1) / p * p);
      for (u64 n = first; n <= hi; n += p) {
        rad[n - lo] *= p;
        mu[n - lo] = static_cast<std::int8_t>(-mu[n - lo]);
      }
      const u64 sq = static_cast<u64>(p) * p;
      for (u64 n = std::max<u64>(sq, (lo + sq - 1) / sq * sq); n <= hi; n += sq) mu[n - lo] = 0;
      for (u64 pk = p; pk <= hi; pk *= p) {
        if (pk >= lo) t.base_[pk] = p;
        if (pk > hi / p) break;
      }
    }
    for (u64 n = lo; n <= hi; ++n) {
      std::int8_t m = mu[n - lo];
      if (n == 1) {
        t.moebius_[n] = 1;
        continue;
      }
      if (rad[n - lo] != n) m = static_cast<std::int8_t>(-m);  // one prime factor > sqrt
      if (rad[n - lo] == 1) t.base_[n] = static_cast<std::uint32_t>(n);  // prime > sqrt
      t.moebius_[n] = m;
    }
  });

  t.primes_.reserve(limit > 100 ? static_cast<std::size_t>(1.3 * limit / std::log(limit)) : 32);
  for (u64 n = 2; n <= limit; ++n) {
    if (t.base_[n] == n) t.primes_.push_back(static_cast<std::uint32_t>(n));
  }
  return t;
}

/// Number of primes <= x.
inline u64 pi(const PrimeTable& table, u64 x) {
  if (x > table.limit()) {
    throw domain_error("pi: " + std::to_string(x) + " exceeds table limit " +
                       std::to_string(table.limit()));
  }
  const auto& pr = table.primes();
  return static_cast<u64>(std::upper_bound(pr.begin(), pr.end(), x) - pr.begin());
}

/// Number of primes in (n, 2n].
inline u64 pi1(const PrimeTable& table, u64 n) {
  if (2 * n > table.limit()) {
    throw domain_error("pi1: 2N = " + std::to_string(2 * n) + " exceeds table limit " +
                       std::to_string(table.limit()));
  }
  return pi(table, 2 * n) - pi(table, n);
}

}  // namespace kloos
