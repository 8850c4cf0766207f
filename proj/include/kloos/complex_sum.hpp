#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "kloos/arith.hpp"
#include "kloos/parallel.hpp"

namespace kloos {

/// A complex sum together with an upper bound on its accumulated rounding
/// error and the number of terms that went into it.
struct ComplexSum {
  double re = 0.0;
  double im = 0.0;
  double err = 0.0;
  u64 terms = 0;

  std::complex<double> value() const { return {re, im}; }
  double abs() const { return std::hypot(re, im); }
};

inline ComplexSum conj(const ComplexSum& s) { return {s.re, -s.im, s.err, s.terms}; }

namespace detail {

// Knuth's TwoSum: s + e == a + b exactly.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

}  // namespace detail

/// Compensated (Neumaier-style) accumulator for complex terms. Also tracks
/// the total term magnitude, from which the final error bound is derived.
class CompensatedSum {
 public:
  static constexpr double kEps = std::numeric_limits<double>::epsilon();

  /// Adds one term whose exact magnitude is at most `magnitude`.
  void add(double re, double im, double magnitude) {
    add_component(re_sum_, re_comp_, re);
    add_component(im_sum_, im_comp_, im);
    magnitude_ += magnitude;
    ++terms_;
  }

  /// Adds coef * s, carrying the error already accumulated inside s.
  void add_scaled(std::complex<double> coef, const ComplexSum& s) {
    const std::complex<double> v = coef * s.value();
    add_component(re_sum_, re_comp_, v.real());
    add_component(im_sum_, im_comp_, v.imag());
    const double c = std::abs(coef);
    magnitude_ += c * s.abs();
    carried_ += c * s.err;
    terms_ += s.terms;
  }

  /// Merges `other` into this accumulator (right operand in index order).
  void merge(const CompensatedSum& other) {
    merge_component(re_sum_, re_comp_, other.re_sum_, other.re_comp_);
    merge_component(im_sum_, im_comp_, other.im_sum_, other.im_comp_);
    magnitude_ += other.magnitude_;
    carried_ += other.carried_;
    terms_ += other.terms_;
  }

  ComplexSum finish() const {
    ComplexSum out;
    out.re = re_sum_ + re_comp_;
    out.im = im_sum_ + im_comp_;
    out.terms = terms_;
    const double mag = std::hypot(out.re, out.im);
    // Per-term evaluation error (phase rounding, weight rounding, product)
    // plus the compensated summation bound.
    out.err = kEps * (3.0 * magnitude_ + 2.0 * mag) +
              static_cast<double>(terms_) * magnitude_ * kEps * kEps + carried_;
    return out;
  }

 private:
  static void add_component(double& sum, double& comp, double x) {
    double s, e;
    detail::two_sum(sum, x, s, e);
    sum = s;
    comp += e;
  }
  static void merge_component(double& sum, double& comp, double osum, double ocomp) {
    double s, e;
    detail::two_sum(sum, osum, s, e);
    sum = s;
    comp += e + ocomp;
  }

  double re_sum_ = 0.0, re_comp_ = 0.0;
  double im_sum_ = 0.0, im_comp_ = 0.0;
  double magnitude_ = 0.0;
  double carried_ = 0.0;
  u64 terms_ = 0;
};

/// Index-range chunk length for deterministic reductions.
inline constexpr std::size_t kChunkSize = std::size_t{1} << 16;

/// Sums over positions [0, count) in fixed chunks of kChunkSize. `chunk`
/// is called as chunk(lo, hi, acc) for the half-open range [lo, hi); chunk
/// results are combined pairwise in ascending chunk order, so the result is
/// bit-identical for any worker count.
template <typename ChunkFn>
ComplexSum chunked_sum(std::size_t count, ChunkFn&& chunk, bool parallel = true) {
  const std::size_t chunks = count == 0 ? 1 : (count + kChunkSize - 1) / kChunkSize;
  std::vector<CompensatedSum> parts(chunks);
  parallel_for(
      chunks,
      [&](std::size_t i) {
        const std::size_t lo = i * kChunkSize;
        const std::size_t hi = std::min(count, lo + kChunkSize);
        if (lo < hi) chunk(lo, hi, parts[i]);
      },
      parallel ? 0 : 1);
  for (std::size_t width = 1; width < parts.size(); width *= 2) {
    for (std::size_t i = 0; i + width < parts.size(); i += 2 * width) parts[i].merge(parts[i + width]);
  }
  return parts[0].finish();
}

}  // namespace kloos
