#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "bgpolymer/distributions.hpp"
#include "bgpolymer/errors.hpp"
#include "bgpolymer/rng.hpp"

namespace bgpolymer {

/// h(y) = a + b*y with max(a, b) > 0.
struct LinearH {
  double a;
  double b;

  LinearH(double a_, double b_) : a(a_), b(b_) {
    if (!(std::max(a, b) > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
      std::ostringstream msg;
      msg << "h(y) = a + b*y needs max(a, b) > 0, got (a, b) = (" << a << ", " << b << ")";
      throw ParameterError(msg.str());
    }
  }

  double operator()(double y) const noexcept { return a + b * y; }
  double derivative() const noexcept { return b; }

  bool operator==(const LinearH&) const = default;
};

struct InvolutionPoint {
  double r1;
  double r2;
  double y;

  /// s = r2 / r1, the ratio preserved by the involution.
  double ratio() const noexcept { return r2 / r1; }

  bool operator==(const InvolutionPoint&) const = default;
};

inline std::string to_string(const InvolutionPoint& p) {
  std::ostringstream out;
  out.precision(17);
  out << "[" << p.r1 << ", " << p.r2 << ", " << p.y << "]";
  return out.str();
}

enum class DomainSign { plus, minus };

/*
 * D^{+/-}_{a,b} = W^{+/-}_{a,b} x V^{+/-}_a x W^+_{a,b} with
 *   V^{+/-}_a     = {x > 0 : +/-(x - a) > 0}
 *   W^{+/-}_{a,b} = {x > 0 : +/-(a + b x) > 0}.
 * These are the maximal product sets on which T^{(a,b)} is an involution.
 */
struct DomainSpec {
  DomainSign sign;
  double a;
  double b;

  bool contains(const InvolutionPoint& p) const noexcept {
    const double pm = sign == DomainSign::plus ? 1.0 : -1.0;
    return p.r1 > 0.0 && pm * (a + b * p.r1) > 0.0 &&  // W
           p.r2 > 0.0 && pm * (p.r2 - a) > 0.0 &&       // V
           p.y > 0.0 && a + b * p.y > 0.0;              // W^+
  }

  /// W^{sign}_{a,b} as an interval; empty intervals have lo >= hi.
  static Interval w_set(DomainSign sign, double a, double b) noexcept {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const bool plus = sign == DomainSign::plus;
    if (b == 0.0) return (plus ? a > 0.0 : a < 0.0) ? Interval{0.0, inf} : Interval{0.0, 0.0};
    const double root = -a / b;  // a + b x changes sign here
    // a + b x > 0 above the root when b > 0, below it when b < 0
    const bool above = plus == (b > 0.0);
    if (above) return {std::max(0.0, root), inf};
    return root > 0.0 ? Interval{0.0, root} : Interval{0.0, 0.0};
  }

  static Interval v_set(DomainSign sign, double a) noexcept {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (sign == DomainSign::plus) return {std::max(0.0, a), inf};
    return a > 0.0 ? Interval{0.0, a} : Interval{0.0, 0.0};
  }

  std::array<Interval, 3> intervals() const noexcept {
    return {w_set(sign, a, b), v_set(sign, a), w_set(DomainSign::plus, a, b)};
  }

  bool empty() const noexcept {
    const auto sets = intervals();
    return std::any_of(sets.begin(), sets.end(), [](const Interval& i) { return !(i.lo < i.hi); });
  }
};

inline bool domain_membership(const DomainSpec& spec, const InvolutionPoint& p) noexcept {
  return spec.contains(p);
}

/// L(s, y) = s + h'(y).
inline double L(double s, double /*y*/, const LinearH& h) noexcept { return s + h.derivative(); }

namespace detail {

inline void require_positive_h(const LinearH& h, double y) {
  if (!(h(y) > 0.0)) {
    std::ostringstream msg;
    msg << "h(y) = " << h.a << " + " << h.b << "*y is not positive at y = " << y;
    throw DomainError(msg.str());
  }
}

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw DomainError(std::string(name) + " must be positive");
}

}  // namespace detail

/// T^{h,y}(r1, r2) = (y + h(y) r1/r2, y r2/r1 + h(y)).
inline std::pair<double, double> apply_Thy(const LinearH& h, double r1, double r2, double y) {
  detail::require_positive(r1, "r1");
  detail::require_positive(r2, "r2");
  detail::require_positive_h(h, y);
  const double hy = h(y);
  return {y + hy * r1 / r2, y * r2 / r1 + hy};
}

/// G(s, y) = (y + h(y)/s, y s + h(y)).
inline std::pair<double, double> apply_G(const LinearH& h, double s, double y) {
  detail::require_positive(s, "s");
  detail::require_positive_h(h, y);
  const double hy = h(y);
  return {y + hy / s, y * s + hy};
}

/// G^{-1}(r1, r2) = (r2/r1, r1 (r2 - a) / (r2 + b r1)).
inline std::pair<double, double> invert_G(const LinearH& h, double r1, double r2) {
  detail::require_positive(r1, "r1");
  detail::require_positive(r2, "r2");
  const double denom = r2 + h.b * r1;
  if (denom == 0.0) throw SingularityError("G is not invertible where r2 + b*r1 = 0");
  const double y_tilde = r1 * (r2 - h.a) / denom;
  if (!(y_tilde > 0.0) || !(h(y_tilde) > 0.0)) {
    throw DomainError("(r1, r2) is not in the image of G for this h");
  }
  return {r2 / r1, y_tilde};
}

/// Third coordinate of T^{(a,b)}; independent of y.
inline double T3(const LinearH& h, double r1, double r2) {
  const double denom = r2 + h.b * r1;
  if (denom == 0.0) throw SingularityError("T3 is singular where r2 + b*r1 = 0");
  return r1 * (r2 - h.a) / denom;
}

inline bool in_involution_domain(const LinearH& h, const InvolutionPoint& p) noexcept {
  return DomainSpec{DomainSign::plus, h.a, h.b}.contains(p) ||
         DomainSpec{DomainSign::minus, h.a, h.b}.contains(p);
}

/*
 * T^{(a,b)}(r1, r2, y) = (y + (a + by) r1/r2, y r2/r1 + (a + by), r1 (r2 - a)/(r2 + b r1)),
 * defined on D^+_{a,b} and D^-_{a,b}, each of which it maps onto itself.
 */
inline InvolutionPoint apply_Tab(const LinearH& h, const InvolutionPoint& p) {
  if (!in_involution_domain(h, p)) {
    throw DomainError("point " + to_string(p) + " is in neither D+ nor D- for (a, b) = (" +
                      std::to_string(h.a) + ", " + std::to_string(h.b) + ")");
  }
  const double hy = h(p.y);
  return {p.y + hy * p.r1 / p.r2, p.y * p.r2 / p.r1 + hy, T3(h, p.r1, p.r2)};
}

inline InvolutionPoint apply_Tab(double a, double b, const InvolutionPoint& p) {
  return apply_Tab(LinearH{a, b}, p);
}

/// The same map assembled as (G x id) o swap_{2,3} o (G x id)^{-1}.
inline InvolutionPoint apply_T_factored(const LinearH& h, const InvolutionPoint& p) {
  const auto [s, y_tilde] = invert_G(h, p.r1, p.r2);
  const auto [r1, r2] = apply_G(h, s, p.y);
  return {r1, r2, y_tilde};
}

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

struct Jacobian3 {
  Matrix3 matrix;
  double det;
};

struct Jacobian2 {
  Matrix2 matrix;
  double det;
};

/// DG(s, y) and its determinant -L(s,y)/s * (y + h(y)/s).
inline Jacobian2 jacobian_G(const LinearH& h, double s, double y) {
  const double l = L(s, y, h);
  const double hy = h(y);
  return {{{{-hy / (s * s), l / s}, {y, l}}}, -l / s * (y + hy / s)};
}

/// DG^{-1}(r1, r2) evaluated through (s, y~) = G^{-1}(r1, r2).
inline Jacobian2 jacobian_G_inverse(const LinearH& h, double r1, double r2) {
  const auto [s, yt] = invert_G(h, r1, r2);
  const double lt = L(s, yt, h);
  if (lt == 0.0) throw SingularityError("L(s, y~) vanishes; G^{-1} is not differentiable");
  return {{{{-s / r1, 1.0 / r1}, {s * yt / (lt * r1), h(yt) / (s * lt * r1)}}}, -s / (r1 * lt)};
}

/// Closed-form Jacobian matrix and determinant of T^{(a,b)}.
inline Jacobian3 jacobian_T(const LinearH& h, const InvolutionPoint& p) {
  if (!in_involution_domain(h, p)) throw DomainError("jacobian_T: point " + to_string(p) + " outside D+/-");
  const double s = p.ratio();
  const double yt = T3(h, p.r1, p.r2);
  const double l = L(s, p.y, h);
  const double lt = L(s, yt, h);
  if (l == 0.0 || lt == 0.0) throw SingularityError("L(s, y) vanishes; T is not a diffeomorphism here");
  const double hy = h(p.y);
  const double inv = 1.0 / p.r1;
  Jacobian3 out;
  out.matrix = {{{inv * hy / s, -inv * hy / (s * s), l / s},
                 {-inv * p.y * s, inv * p.y, l},
                 {inv * yt * s / lt, inv * h(yt) / (s * lt), 0.0}}};
  out.det = -(p.y / p.r1 + hy / p.r2) * l / lt;
  return out;
}

inline Jacobian3 jacobian_T(double a, double b, const InvolutionPoint& p) {
  return jacobian_T(LinearH{a, b}, p);
}

inline double determinant(const Matrix3& m) noexcept {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Spread of the log-uniform offsets used when drawing points from unbounded domains.
struct LogRange {
  double lo = 1e-2;
  double hi = 1e2;
};

/*
 * Place a positive offset e inside the open interval (lo, hi):
 *   (0, inf)    -> e
 *   (lo, inf)   -> lo (1 + e)
 *   (lo, hi)    -> lo + (hi - lo) e / (1 + e)
 * so log-uniform e covers both ends of the interval on a log scale.
 */
inline double place_in_interval(const Interval& set, double e) noexcept {
  if (std::isinf(set.hi)) return set.lo == 0.0 ? e : set.lo * (1.0 + e);
  return set.lo + (set.hi - set.lo) * (e / (1.0 + e));
}

/// Random point of D^{sign}_{a,b}; rejects the rare draw rounded onto a boundary.
inline InvolutionPoint random_domain_point(const DomainSpec& domain, SeededStream& rng,
                                           LogRange range = {}) {
  if (domain.empty()) throw DomainError("cannot sample from an empty domain");
  const auto sets = domain.intervals();
  const double llo = std::log(range.lo);
  const double lhi = std::log(range.hi);
  for (;;) {
    std::array<double, 3> coord{};
    for (std::size_t k = 0; k < 3; ++k) {
      coord[k] = place_in_interval(sets[k], std::exp(llo + (lhi - llo) * rng.uniform()));
    }
    const InvolutionPoint p{coord[0], coord[1], coord[2]};
    if (domain.contains(p)) return p;
  }
}

}  // namespace bgpolymer
