#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bgpolymer/errors.hpp"
#include "bgpolymer/numeric.hpp"
#include "bgpolymer/rng.hpp"

namespace bgpolymer {

/*
 * The five beta-gamma families.
 *
 *   Gamma(a, b)               density b^a x^(a-1) e^(-bx) / Gamma(a) on (0, inf)
 *   Beta(a, b)                on (0, 1)
 *   InverseGamma(a, b)        1/X with X ~ Gamma(a, b), on (0, inf)
 *   InverseBeta(a, b)         1/X with X ~ Beta(a, b), on (1, inf)
 *   ShiftedInverseBeta(a, b)  InverseBeta(a, b) - 1, on (0, inf)
 *
 * For the gamma-type families shape2 is the rate of the underlying gamma.
 */
enum class Family { Gamma, Beta, InverseGamma, InverseBeta, ShiftedInverseBeta };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::Gamma: return "Gamma";
    case Family::Beta: return "Beta";
    case Family::InverseGamma: return "InverseGamma";
    case Family::InverseBeta: return "InverseBeta";
    case Family::ShiftedInverseBeta: return "ShiftedInverseBeta";
  }
  return "?";
}

inline Family parse_family(std::string_view name) {
  for (Family f : {Family::Gamma, Family::Beta, Family::InverseGamma, Family::InverseBeta,
                   Family::ShiftedInverseBeta}) {
    if (family_name(f) == name) return f;
  }
  throw ParameterError("unknown distribution family '" + std::string(name) + "'");
}

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo;
  double hi;

  bool contains(double x) const noexcept { return x > lo && x < hi; }
  bool operator==(const Interval&) const = default;
};

class DistributionSpec {
 public:
  DistributionSpec(Family family, double shape1, double shape2)
      : family_(family), shape1_(shape1), shape2_(shape2) {
    if (!(shape1 > 0.0) || !(shape2 > 0.0) || !std::isfinite(shape1) || !std::isfinite(shape2)) {
      std::ostringstream msg;
      msg << family_name(family) << " shapes must be positive and finite, got (" << shape1 << ", "
          << shape2 << ")";
      throw ParameterError(msg.str());
    }
  }

  static DistributionSpec gamma(double a, double b) { return {Family::Gamma, a, b}; }
  static DistributionSpec beta(double a, double b) { return {Family::Beta, a, b}; }
  static DistributionSpec inverse_gamma(double a, double b) { return {Family::InverseGamma, a, b}; }
  static DistributionSpec inverse_beta(double a, double b) { return {Family::InverseBeta, a, b}; }
  static DistributionSpec shifted_inverse_beta(double a, double b) {
    return {Family::ShiftedInverseBeta, a, b};
  }

  Family family() const noexcept { return family_; }
  double shape1() const noexcept { return shape1_; }
  double shape2() const noexcept { return shape2_; }

  Interval support() const noexcept {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (family_) {
      case Family::Beta: return {0.0, 1.0};
      case Family::InverseBeta: return {1.0, inf};
      default: return {0.0, inf};
    }
  }

  std::string to_string() const {
    std::ostringstream out;
    switch (family_) {
      case Family::Gamma: out << "Ga"; break;
      case Family::Beta: out << "Be"; break;
      case Family::InverseGamma: out << "Ga^-1"; break;
      case Family::InverseBeta: out << "Be^-1"; break;
      case Family::ShiftedInverseBeta: out << "(Be^-1"; break;
    }
    out << "(" << shape1_ << "," << shape2_ << ")";
    if (family_ == Family::ShiftedInverseBeta) out << "-1)";
    return out.str();
  }

  bool operator==(const DistributionSpec&) const = default;

 private:
  Family family_;
  double shape1_;
  double shape2_;
};

namespace detail {

// Marsaglia-Tsang squeeze method for shape >= 1; shape < 1 is boosted through
// Gamma(shape + 1) * U^(1/shape).
inline double standard_gamma(double shape, SeededStream& rng) {
  if (shape < 1.0) {
    for (;;) {
      const double g = standard_gamma(shape + 1.0, rng);
      const double x = g * std::exp(std::log(rng.uniform()) / shape);
      if (x > 0.0) return x;
    }
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
    if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double log_beta_fn(double a, double b) {
  return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

}  // namespace detail

/// One draw, strictly inside the support.
inline double draw(const DistributionSpec& spec, SeededStream& rng) {
  const double a = spec.shape1();
  const double b = spec.shape2();
  for (;;) {
    double x = 0.0;
    switch (spec.family()) {
      case Family::Gamma: x = detail::standard_gamma(a, rng) / b; break;
      case Family::InverseGamma: x = b / detail::standard_gamma(a, rng); break;
      case Family::Beta: {
        const double g1 = detail::standard_gamma(a, rng);
        const double g2 = detail::standard_gamma(b, rng);
        x = g1 / (g1 + g2);
        break;
      }
      case Family::InverseBeta: {
        const double g1 = detail::standard_gamma(a, rng);
        const double g2 = detail::standard_gamma(b, rng);
        x = 1.0 + g2 / g1;
        break;
      }
      case Family::ShiftedInverseBeta: {
        const double g1 = detail::standard_gamma(a, rng);
        const double g2 = detail::standard_gamma(b, rng);
        x = g2 / g1;
        break;
      }
    }
    // Rounding can land exactly on an endpoint; redraw.
    if (spec.support().contains(x)) return x;
  }
}

inline std::vector<double> sample(const DistributionSpec& spec, SeededStream& rng, std::size_t n) {
  if (n == 0) throw ParameterError("sample size must be at least 1");
  std::vector<double> out(n);
  for (auto& x : out) x = draw(spec, rng);
  return out;
}

/// Natural log of the density; -inf outside the open support.
inline double log_pdf(const DistributionSpec& spec, double x) {
  if (!spec.support().contains(x)) return kNegInf;
  const double a = spec.shape1();
  const double b = spec.shape2();
  switch (spec.family()) {
    case Family::Gamma:
      return a * std::log(b) - boost::math::lgamma(a) + (a - 1.0) * std::log(x) - b * x;
    case Family::InverseGamma:
      return a * std::log(b) - boost::math::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
    case Family::Beta:
      return -detail::log_beta_fn(a, b) + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x);
    case Family::InverseBeta:
      return -detail::log_beta_fn(a, b) - (a + b) * std::log(x) + (b - 1.0) * std::log(x - 1.0);
    case Family::ShiftedInverseBeta:
      return -detail::log_beta_fn(a, b) - (a + b) * std::log1p(x) + (b - 1.0) * std::log(x);
  }
  return kNegInf;
}

/*
 * k-th derivative (k = 1, 2, 3) of log_pdf at an interior point. Every family
 * has a log-density of the form c1*log(x - p1) + c2*log(x - p2) + c3*x + c4/x,
 * which is what the switch below encodes.
 */
inline double log_pdf_derivative(const DistributionSpec& spec, double x, int order) {
  if (order < 1 || order > 3) throw ParameterError("log-density derivatives of order 1-3 only");
  if (!spec.support().contains(x)) {
    std::ostringstream msg;
    msg << "derivative of log-density of " << spec.to_string() << " requested at " << x
        << ", outside the open support";
    throw DomainError(msg.str());
  }
  const double a = spec.shape1();
  const double b = spec.shape2();

  // d^k/dx^k log(x - p) = (-1)^(k-1) (k-1)! / (x - p)^k
  auto dlog = [order](double coeff, double offset) {
    if (coeff == 0.0) return 0.0;
    const double t = 1.0 / offset;
    switch (order) {
      case 1: return coeff * t;
      case 2: return -coeff * t * t;
      default: return 2.0 * coeff * t * t * t;
    }
  };
  // d^k/dx^k (1/x) = (-1)^k k! / x^(k+1)
  auto dinv = [order](double coeff, double x) {
    const double t = 1.0 / x;
    switch (order) {
      case 1: return -coeff * t * t;
      case 2: return 2.0 * coeff * t * t * t;
      default: return -6.0 * coeff * t * t * t * t;
    }
  };
  const double linear = order == 1 ? 1.0 : 0.0;

  switch (spec.family()) {
    case Family::Gamma: return dlog(a - 1.0, x) - b * linear;
    case Family::InverseGamma: return dlog(-(a + 1.0), x) + dinv(-b, x);
    case Family::Beta: return dlog(a - 1.0, x) + dlog(b - 1.0, x - 1.0);
    case Family::InverseBeta: return dlog(-(a + b), x) + dlog(b - 1.0, x - 1.0);
    case Family::ShiftedInverseBeta: return dlog(-(a + b), x + 1.0) + dlog(b - 1.0, x);
  }
  return 0.0;
}

inline double dlog_pdf(const DistributionSpec& spec, double x) { return log_pdf_derivative(spec, x, 1); }
inline double ddlog_pdf(const DistributionSpec& spec, double x) { return log_pdf_derivative(spec, x, 2); }
inline double d3log_pdf(const DistributionSpec& spec, double x) { return log_pdf_derivative(spec, x, 3); }

/// E[log X], closed form through the digamma function.
inline double expected_log(const DistributionSpec& spec) {
  using boost::math::digamma;
  const double a = spec.shape1();
  const double b = spec.shape2();
  switch (spec.family()) {
    case Family::Gamma: return digamma(a) - std::log(b);
    case Family::InverseGamma: return std::log(b) - digamma(a);
    case Family::Beta: return digamma(a) - digamma(a + b);
    case Family::InverseBeta: return digamma(a + b) - digamma(a);
    case Family::ShiftedInverseBeta: return digamma(b) - digamma(a);
  }
  return 0.0;
}

/*
 * Law of shift + scale * X with X ~ base. Used for the scaled, shifted and
 * reflected laws that appear in the modified models; scale may be negative.
 */
class AffineLaw {
 public:
  AffineLaw(DistributionSpec base, double scale = 1.0, double shift = 0.0)
      : base_(base), scale_(scale), shift_(shift) {
    if (scale == 0.0 || !std::isfinite(scale) || !std::isfinite(shift)) {
      throw ParameterError("affine law needs a finite non-zero scale and finite shift");
    }
  }

  const DistributionSpec& base() const noexcept { return base_; }
  double scale() const noexcept { return scale_; }
  double shift() const noexcept { return shift_; }

  /// Law of c * X + d for this law's X.
  AffineLaw then(double c, double d = 0.0) const { return {base_, c * scale_, c * shift_ + d}; }

  Interval support() const noexcept {
    const Interval s = base_.support();
    const double lo = shift_ + scale_ * s.lo;
    const double hi = shift_ + scale_ * s.hi;
    return scale_ > 0.0 ? Interval{lo, hi} : Interval{hi, lo};
  }

  double draw(SeededStream& rng) const { return shift_ + scale_ * bgpolymer::draw(base_, rng); }

  std::vector<double> sample(SeededStream& rng, std::size_t n) const {
    if (n == 0) throw ParameterError("sample size must be at least 1");
    std::vector<double> out(n);
    for (auto& x : out) x = draw(rng);
    return out;
  }

  double log_pdf(double x) const {
    if (!support().contains(x)) return kNegInf;
    return bgpolymer::log_pdf(base_, to_base(x)) - std::log(std::abs(scale_));
  }

  /// k-th derivative of log_pdf, k in {1, 2, 3}.
  double log_pdf_derivative(double x, int order) const {
    if (!support().contains(x)) {
      std::ostringstream msg;
      msg << "derivative of log-density of " << to_string() << " requested at " << x
          << ", outside the open support";
      throw DomainError(msg.str());
    }
    return bgpolymer::log_pdf_derivative(base_, to_base(x), order) / std::pow(scale_, order);
  }
  double dlog_pdf(double x) const { return log_pdf_derivative(x, 1); }
  double ddlog_pdf(double x) const { return log_pdf_derivative(x, 2); }
  double d3log_pdf(double x) const { return log_pdf_derivative(x, 3); }

  /// E[log X]; only defined for positive scale and no shift.
  double expected_log() const {
    if (shift_ != 0.0 || scale_ < 0.0) {
      throw ParameterError("expected log has no closed form for shifted or reflected laws");
    }
    return bgpolymer::expected_log(base_) + std::log(scale_);
  }

  std::string to_string() const {
    std::ostringstream out;
    if (shift_ != 0.0) out << shift_ << (scale_ < 0.0 ? " - " : " + ");
    const double c = shift_ != 0.0 ? std::abs(scale_) : scale_;
    if (c != 1.0) out << c << "*";
    out << base_.to_string();
    return out.str();
  }

  bool operator==(const AffineLaw&) const = default;

 private:
  double to_base(double x) const { return (x - shift_) / scale_; }

  DistributionSpec base_;
  double scale_;
  double shift_;
};

}  // namespace bgpolymer
