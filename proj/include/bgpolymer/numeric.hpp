#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace bgpolymer {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(sum_i exp(xs[i])). Empty input gives -inf.
inline double log_sum_exp(std::span<const double> xs) noexcept {
  if (xs.empty()) return kNegInf;
  const double hi = *std::max_element(xs.begin(), xs.end());
  if (hi == kNegInf) return kNegInf;
  if (std::isinf(hi)) return hi;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - hi);
  return hi + std::log(sum);
}

/// |a - b| / max(1, |a|, |b|).
inline double relative_gap(double a, double b) noexcept {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// |a - b| / max(|a|, |b|), zero when both vanish.
inline double strict_relative_gap(double a, double b) noexcept {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace bgpolymer
