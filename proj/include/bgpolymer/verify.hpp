#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bgpolymer/distributions.hpp"
#include "bgpolymer/errors.hpp"
#include "bgpolymer/involution.hpp"
#include "bgpolymer/models.hpp"
#include "bgpolymer/numeric.hpp"
#include "bgpolymer/rng.hpp"

namespace bgpolymer {

/// Polynomial h(y) = sum_k c_k y^k with analytic derivatives. Non-linear ones only serve as negative controls.
class PolyH {
 public:
  PolyH(std::initializer_list<double> coeffs) : c_(coeffs) {}
  explicit PolyH(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  PolyH(const LinearH& h) : c_{h.a, h.b} {}  // NOLINT: implicit by intent

  /// k-th derivative at y (k = 0 gives the value).
  double derivative(double y, int k = 0) const noexcept {
    double sum = 0.0;
    double power = 1.0;
    for (std::size_t i = static_cast<std::size_t>(k); i < c_.size(); ++i) {
      double falling = 1.0;
      for (int t = 0; t < k; ++t) falling *= static_cast<double>(i - static_cast<std::size_t>(t));
      sum += c_[i] * falling * power;
      power *= y;
    }
    return sum;
  }
  double operator()(double y) const noexcept { return derivative(y, 0); }

  bool is_linear() const noexcept {
    return std::all_of(c_.begin() + std::min<std::size_t>(2, c_.size()), c_.end(),
                       [](double c) { return c == 0.0; });
  }

  LinearH as_linear() const {
    if (!is_linear()) throw ParameterError("h is not linear; T^{(a,b)} is undefined");
    return {c_.empty() ? 0.0 : c_[0], c_.size() > 1 ? c_[1] : 0.0};
  }

 private:
  std::vector<double> c_;
};

/// Densities f1, f2, f3 of (R1, R2, Y) together with h.
struct DensityTriple {
  AffineLaw f1;
  AffineLaw f2;
  AffineLaw f3;
  PolyH h;

  static DensityTriple from(const InvariantModel& m) {
    return {m.triple.r1, m.triple.r2, m.triple.y, PolyH(m.h)};
  }

  bool in_support(const InvolutionPoint& p) const noexcept {
    return f1.support().contains(p.r1) && f2.support().contains(p.r2) &&
           f3.support().contains(p.y);
  }
};

namespace detail {
inline void require_support(const DensityTriple& t, const InvolutionPoint& p) {
  if (!t.in_support(p)) throw DomainError("point " + to_string(p) + " is outside the support product");
}
}  // namespace detail

/// log q(r1, r2, y) = log r2 - log|L(r2/r1, y)| + log f1(r1) + log f2(r2) + log f3(y).
inline double q_value(const DensityTriple& t, const InvolutionPoint& p) {
  detail::require_support(t, p);
  const double l = p.ratio() + t.h.derivative(p.y, 1);
  if (l == 0.0) throw SingularityError("L(s, y) vanishes at " + to_string(p));
  return std::log(p.r2) - std::log(std::abs(l)) + t.f1.log_pdf(p.r1) + t.f2.log_pdf(p.r2) +
         t.f3.log_pdf(p.y);
}

/*
 * Low-discrepancy points on the support product of a triple: a Halton
 * sequence in bases 2, 3, 5 with a seeded Cranley-Patterson shift, each
 * coordinate turned into a log-uniform offset and placed in its support
 * interval (see place_in_interval).
 */
class PointPlan {
 public:
  PointPlan(const DensityTriple& t, std::uint64_t seed, LogRange range = {})
      : supports_{t.f1.support(), t.f2.support(), t.f3.support()}, range_(range) {
    SeededStream rng(seed);
    for (auto& s : shift_) s = rng.uniform();
  }

  InvolutionPoint point(std::size_t index) const {
    static constexpr std::array<unsigned, 3> bases{2, 3, 5};
    std::array<double, 3> coord{};
    const double llo = std::log(range_.lo);
    const double lhi = std::log(range_.hi);
    for (std::size_t k = 0; k < 3; ++k) {
      double u = radical_inverse(index + 1, bases[k]) + shift_[k];
      u -= std::floor(u);
      if (u == 0.0) u = 0.5;
      coord[k] = place_in_interval(supports_[k], std::exp(llo + (lhi - llo) * u));
    }
    return {coord[0], coord[1], coord[2]};
  }

 private:
  static double radical_inverse(std::size_t i, unsigned base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (i > 0) {
      result += f * static_cast<double>(i % base);
      i /= base;
      f /= base;
    }
    return result;
  }

  std::array<Interval, 3> supports_;
  LogRange range_;
  std::array<double, 3> shift_{};
};

struct DiscrepancyResult {
  std::size_t n_points = 0;
  double max_abs = 0.0;       // max |log q(Tx) - log q(x)|
  double max_relative = 0.0;  // same gap over max(1, |log q|)
  InvolutionPoint worst{0.0, 0.0, 0.0};
};

/// Evaluates log q o T - log q on `n_points` plan points that lie in the support product.
inline DiscrepancyResult q_invariance_check(const DensityTriple& t, std::size_t n_points,
                                            std::uint64_t seed) {
  const LinearH h = t.h.as_linear();
  const PointPlan plan(t, seed);
  DiscrepancyResult out;
  for (std::size_t k = 0; out.n_points < n_points; ++k) {
    const InvolutionPoint x = plan.point(k);
    if (!t.in_support(x) || !in_involution_domain(h, x)) continue;
    const InvolutionPoint tx = apply_Tab(h, x);
    const double before = q_value(t, x);
    const double after = q_value(t, tx);
    const double gap = std::abs(after - before);
    if (gap > out.max_abs || !std::isfinite(gap)) {
      out.max_abs = std::isfinite(gap) ? gap : std::numeric_limits<double>::infinity();
      out.worst = x;
    }
    out.max_relative = std::max(out.max_relative, relative_gap(after, before));
    ++out.n_points;
  }
  return out;
}

struct SplitResidual {
  double lhs;
  double rhs;
  double residual() const noexcept { return lhs - rhs; }
  double relative() const noexcept { return relative_gap(lhs, rhs); }
};

/// g(s, y) = eta3'(y)/L(s,y) - h''(y)/L(s,y)^2.
inline double g_function(const DensityTriple& t, double s, double y) {
  const double l = s + t.h.derivative(y, 1);
  if (l == 0.0) throw SingularityError("L(s, y) vanishes");
  return t.f3.dlog_pdf(y) / l - t.h.derivative(y, 2) / (l * l);
}

/// Both sides of 1 + r1 eta1'(r1) + r2 eta2'(r2) = r2 g(s, y~), with y~ = T3(r1, r2).
inline SplitResidual split_identity_residual(const DensityTriple& t, const InvolutionPoint& p) {
  detail::require_support(t, p);
  const LinearH h = t.h.as_linear();
  const double yt = T3(h, p.r1, p.r2);
  if (!t.f3.support().contains(yt)) {
    std::ostringstream msg;
    msg << "T3(r1, r2) = " << yt << " is outside the support of Y";
    throw DomainError(msg.str());
  }
  const double lhs = 1.0 + p.r1 * t.f1.dlog_pdf(p.r1) + p.r2 * t.f2.dlog_pdf(p.r2);
  return {lhs, p.r2 * g_function(t, p.ratio(), yt)};
}

struct Kappa {
  double k2, k3, k4;
};

/*
 *   kappa2 = y eta3'' + eta3'
 *   kappa3 = -y h'' eta3' - y h''' - 2 h''
 *   kappa4 = 2 y h''^2
 */
inline Kappa kappa_coefficients(const DensityTriple& t, double y) {
  if (!t.f3.support().contains(y)) throw DomainError("kappa: y outside the support of Y");
  const double e1 = t.f3.dlog_pdf(y);
  const double e2 = t.f3.ddlog_pdf(y);
  const double h2 = t.h.derivative(y, 2);
  const double h3 = t.h.derivative(y, 3);
  return {y * e2 + e1, -y * h2 * e1 - y * h3 - 2.0 * h2, 2.0 * y * h2 * h2};
}

/// y-derivatives of the kappa coefficients.
inline Kappa kappa_derivatives(const DensityTriple& t, double y) {
  if (!t.f3.support().contains(y)) throw DomainError("kappa: y outside the support of Y");
  const double e1 = t.f3.dlog_pdf(y);
  const double e2 = t.f3.ddlog_pdf(y);
  const double e3 = t.f3.d3log_pdf(y);
  const double h2 = t.h.derivative(y, 2);
  const double h3 = t.h.derivative(y, 3);
  const double h4 = t.h.derivative(y, 4);
  return {y * e3 + 2.0 * e2,
          -h2 * e1 - y * h3 * e1 - y * h2 * e2 - h3 - y * h4 - 2.0 * h3,
          2.0 * h2 * h2 + 4.0 * y * h2 * h3};
}

struct PolynomialResidual {
  double value;
  // Same sum with every factor replaced by the absolute values of its pieces
  // before cancellation; a bound on the scale of rounding error in `value`.
  double magnitude;
  double relative() const noexcept { return magnitude == 0.0 ? 0.0 : std::abs(value) / magnitude; }
};

/*
 * sum_{j=2..4} [L^(5-j), -j kappa_j L^(4-j)] . [[2 kappa_j, kappa_j'], [s, h'']] . [L, h]^T
 * with L = s + h'(y). Vanishes identically for invariant linear-h triples; at
 * s = -h'(y) it equals -8 y h(y) h''(y)^3.
 */
inline PolynomialResidual polynomial_identity_residual(const DensityTriple& t, double s, double y) {
  const Kappa k = kappa_coefficients(t, y);
  const Kappa dk = kappa_derivatives(t, y);
  const double e1 = std::abs(t.f3.dlog_pdf(y));
  const double e2 = std::abs(t.f3.ddlog_pdf(y));
  const double e3 = std::abs(t.f3.d3log_pdf(y));
  const double h1 = t.h.derivative(y, 1);
  const double h2 = t.h.derivative(y, 2);
  const double h3 = std::abs(t.h.derivative(y, 3));
  const double h4 = std::abs(t.h.derivative(y, 4));
  const double l = s + h1;
  const double hy = t.h(y);
  const double ah2 = std::abs(h2);
  const double ay = std::abs(y);

  const std::array<double, 3> kap{k.k2, k.k3, k.k4};
  const std::array<double, 3> dkap{dk.k2, dk.k3, dk.k4};
  const std::array<double, 3> kap_abs{ay * e2 + e1, ay * ah2 * e1 + ay * h3 + 2.0 * ah2,
                                      2.0 * ay * ah2 * ah2};
  const std::array<double, 3> dkap_abs{ay * e3 + 2.0 * e2,
                                       ah2 * e1 + ay * h3 * e1 + ay * ah2 * e2 + 3.0 * h3 + ay * h4,
                                       2.0 * ah2 * ah2 + 4.0 * ay * ah2 * h3};
  const double al = std::abs(s) + std::abs(h1);
  const double as = std::abs(s);
  const double ahy = std::abs(hy);

  PolynomialResidual out{0.0, 0.0};
  for (int j = 2; j <= 4; ++j) {
    const double kj = kap[j - 2];
    const double a = std::pow(l, 5 - j);
    const double b = -j * kj * std::pow(l, 4 - j);
    out.value += 2.0 * kj * a * l + s * b * l + dkap[j - 2] * a * hy + h2 * b * hy;

    const double kj_abs = kap_abs[j - 2];
    const double a_abs = std::pow(al, 5 - j);
    const double b_abs = j * kj_abs * std::pow(al, 4 - j);
    out.magnitude += 2.0 * kj_abs * a_abs * al + as * b_abs * al + dkap_abs[j - 2] * a_abs * ahy +
                     ah2 * b_abs * ahy;
  }
  return out;
}

struct InvolutionCheck {
  std::size_t n_points = 0;
  double max_roundtrip = 0.0;  // max_k |(T o T x)_k - x_k| / |x_k|
  double max_ratio = 0.0;      // max |r2~/r1~ - r2/r1| / (r2/r1)
};

/// T o T = id and ratio persistence over random points of `domain`.
inline InvolutionCheck involution_check(const DomainSpec& domain, std::size_t n_points,
                                        std::uint64_t seed) {
  const LinearH h{domain.a, domain.b};
  SeededStream rng(seed);
  InvolutionCheck out;
  for (; out.n_points < n_points; ++out.n_points) {
    const InvolutionPoint x = random_domain_point(domain, rng);
    const InvolutionPoint tx = apply_Tab(h, x);
    const InvolutionPoint ttx = apply_Tab(h, tx);
    out.max_roundtrip = std::max({out.max_roundtrip, std::abs(ttx.r1 - x.r1) / x.r1,
                                  std::abs(ttx.r2 - x.r2) / x.r2, std::abs(ttx.y - x.y) / x.y});
    out.max_ratio = std::max(out.max_ratio, std::abs(tx.ratio() - x.ratio()) / x.ratio());
  }
  return out;
}

struct JacobianCheck {
  std::size_t n_points = 0;
  double max_entry = 0.0;  // entrywise relative gap over the non-zero closed-form entries
  double max_det = 0.0;
  // Closed-form zeros (dT3/dy) are checked against the differencing noise
  // eps |T_r| / step; counts stencils exceeding 1e3 times that noise.
  std::size_t zero_violations = 0;
};

/*
 * Closed-form DT against five-point central differences with step 1e-4 |x_k|,
 * at random points whose stencil stays inside the domain.
 */
inline JacobianCheck jacobian_check(const DomainSpec& domain, std::size_t n_points,
                                    std::uint64_t seed) {
  const LinearH h{domain.a, domain.b};
  SeededStream rng(seed);
  JacobianCheck out;
  auto coords = [](const InvolutionPoint& p) { return std::array<double, 3>{p.r1, p.r2, p.y}; };
  while (out.n_points < n_points) {
    const InvolutionPoint x = random_domain_point(domain, rng);
    const auto base = coords(x);
    Matrix3 fd{};
    bool inside = true;
    for (std::size_t k = 0; k < 3 && inside; ++k) {
      const double step = 1e-4 * base[k];
      std::array<std::array<double, 3>, 4> t{};  // T at x + {-2,-1,1,2} step e_k
      constexpr std::array<double, 4> offsets{-2.0, -1.0, 1.0, 2.0};
      for (std::size_t o = 0; o < 4 && inside; ++o) {
        auto shifted = base;
        shifted[k] += offsets[o] * step;
        const InvolutionPoint xs{shifted[0], shifted[1], shifted[2]};
        if (!domain.contains(xs)) inside = false;
        else t[o] = coords(apply_Tab(h, xs));
      }
      if (!inside) break;
      for (std::size_t r = 0; r < 3; ++r) {
        fd[r][k] = (t[0][r] - 8.0 * t[1][r] + 8.0 * t[2][r] - t[3][r]) / (12.0 * step);
      }
    }
    if (!inside) continue;
    const Jacobian3 jac = jacobian_T(h, x);
    const auto tx = coords(apply_Tab(h, x));
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double an = jac.matrix[r][c];
        if (an == 0.0) {
          const double noise = std::numeric_limits<double>::epsilon() * std::abs(tx[r]) / (1e-4 * base[c]);
          if (std::abs(fd[r][c]) > 1e3 * noise) ++out.zero_violations;
        } else {
          out.max_entry = std::max(out.max_entry, std::abs(an - fd[r][c]) / std::abs(an));
        }
      }
    }
    out.max_det = std::max(out.max_det, strict_relative_gap(jac.det, determinant(fd)));
    ++out.n_points;
  }
  return out;
}

/// min |L(s, y)| over random points of the model's domain.
inline double min_abs_L(const InvariantModel& m, std::size_t n_points, std::uint64_t seed) {
  SeededStream rng(seed);
  const DomainSpec d = m.domain();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_points; ++k) {
    const InvolutionPoint p = random_domain_point(d, rng);
    best = std::min(best, std::abs(L(p.ratio(), p.y, m.h)));
  }
  return best;
}

/// Which shape of which coordinate law to nudge in negative controls.
enum class Coordinate { R1, R2, Y };

inline AffineLaw perturb_shape(const AffineLaw& law, int which_shape, double delta) {
  const DistributionSpec& b = law.base();
  const DistributionSpec nb = which_shape == 1
                                  ? DistributionSpec(b.family(), b.shape1() + delta, b.shape2())
                                  : DistributionSpec(b.family(), b.shape1(), b.shape2() + delta);
  return {nb, law.scale(), law.shift()};
}

inline DensityTriple perturb(DensityTriple t, Coordinate c, int which_shape, double delta) {
  switch (c) {
    case Coordinate::R1: t.f1 = perturb_shape(t.f1, which_shape, delta); break;
    case Coordinate::R2: t.f2 = perturb_shape(t.f2, which_shape, delta); break;
    case Coordinate::Y: t.f3 = perturb_shape(t.f3, which_shape, delta); break;
  }
  return t;
}

}  // namespace bgpolymer
