#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "bgpolymer/distributions.hpp"
#include "bgpolymer/errors.hpp"
#include "bgpolymer/involution.hpp"
#include "bgpolymer/models.hpp"
#include "bgpolymer/rng.hpp"

namespace bgpolymer {

/*
 * Outcome of one named check. For KS tests `threshold` is the critical value
 * and pass means statistic < threshold; for independence tests `threshold`
 * is the level and pass means p_value > threshold.
 */
struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  std::string detail;
};

inline bool all_pass(std::span<const TestReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.pass; });
}

/// Asymptotic two-sample KS critical value c(level) * sqrt((n + m) / (n m)).
inline double ks_critical_value(std::size_t n, std::size_t m, double level) {
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  return c * std::sqrt((nd + md) / (nd * md));
}

/// Kolmogorov survival function Q(t) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 t^2).
inline double kolmogorov_q(double t) {
  if (t < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// sup_x |F_xs(x) - F_ys(x)| over the two empirical CDFs.
inline double ks_statistic(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline TestReport ks_two_sample(std::span<const double> xs, std::span<const double> ys, double level,
                                std::string name = "ks", std::uint64_t seed = 0) {
  if (xs.empty() || ys.empty()) throw ParameterError("ks_two_sample needs two non-empty samples");
  TestReport r;
  r.name = std::move(name);
  r.n1 = xs.size();
  r.n2 = ys.size();
  r.seed = seed;
  r.statistic = ks_statistic(xs, ys);
  r.threshold = ks_critical_value(r.n1, r.n2, level);
  const double ne = static_cast<double>(r.n1) * r.n2 / static_cast<double>(r.n1 + r.n2);
  const double sq = std::sqrt(ne);
  r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * r.statistic);
  r.pass = r.statistic < r.threshold;
  return r;
}

/// Mid-ranks (ties averaged), 1-based.
inline std::vector<double> ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return xs[l] < xs[r]; });
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = mid;
    i = j + 1;
  }
  return out;
}

inline double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
  const auto rx = ranks(xs);
  const auto ry = ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

/*
 * Rank-based independence test: Spearman correlation z-test (z = rho sqrt(n-1))
 * and a chi-square test on a 10 x 10 grid of marginal quantile bins (81 df).
 * Passes only if both p-values exceed `level`; p_value reports the smaller.
 */
inline TestReport independence_test(std::span<const double> xs, std::span<const double> ys,
                                    double level, std::string name = "independence",
                                    std::uint64_t seed = 0) {
  if (xs.size() != ys.size()) throw ParameterError("independence_test needs paired samples");
  if (xs.size() < 1000) throw ParameterError("independence_test needs at least 1000 pairs");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) throw ParameterError("independence_test: constant coordinate");

  const std::size_t n = xs.size();
  const double rho = spearman_rho(xs, ys);
  const double z = rho * std::sqrt(static_cast<double>(n) - 1.0);
  const double p_spearman = std::erfc(std::abs(z) / std::sqrt(2.0));

  constexpr std::size_t bins = 10;
  auto bin_of = [n](std::span<const double> v) {
    const auto rk = ranks(v);
    std::vector<std::size_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto b = static_cast<std::size_t>((rk[i] - 0.5) * bins / static_cast<double>(n));
      out[i] = std::min(b, bins - 1);
    }
    return out;
  };
  const auto bx = bin_of(xs);
  const auto by = bin_of(ys);
  std::array<std::array<double, bins>, bins> counts{};
  std::array<double, bins> row{}, col{};
  for (std::size_t i = 0; i < n; ++i) {
    counts[bx[i]][by[i]] += 1.0;
    row[bx[i]] += 1.0;
    col[by[i]] += 1.0;
  }
  double chi2 = 0.0;
  std::size_t used_rows = 0, used_cols = 0;
  for (std::size_t i = 0; i < bins; ++i) {
    used_rows += row[i] > 0.0;
    used_cols += col[i] > 0.0;
    for (std::size_t j = 0; j < bins; ++j) {
      const double expected = row[i] * col[j] / static_cast<double>(n);
      if (expected > 0.0) chi2 += (counts[i][j] - expected) * (counts[i][j] - expected) / expected;
    }
  }
  const double df = static_cast<double>((used_rows - 1) * (used_cols - 1));
  const double p_chi2 = df > 0.0 ? boost::math::gamma_q(df / 2.0, chi2 / 2.0) : 1.0;

  TestReport r;
  r.name = std::move(name);
  r.statistic = chi2;
  r.threshold = level;
  r.p_value = std::min(p_spearman, p_chi2);
  r.n1 = r.n2 = n;
  r.seed = seed;
  r.pass = p_spearman > level && p_chi2 > level;
  r.detail = "spearman_rho=" + std::to_string(rho) + " p_spearman=" + std::to_string(p_spearman) +
             " chi2_p=" + std::to_string(p_chi2);
  return r;
}

/*
 * Monte Carlo check that (R1, R2) is T^{h,Y}-invariant, in both equivalent forms:
 *   (i)   T1 ~ R1          (ii)  T2 ~ R2          (iii) T1 independent of T2
 *   (iv)  T3(R1, R2) ~ Y   (v)   R2/R1 independent of T3(R1, R2)
 * Reference laws are sampled on separate streams derived from `seed`.
 */
inline std::vector<TestReport> invariance_suite(const StationaryTriple& triple, const LinearH& h,
                                                std::size_t n, std::uint64_t seed,
                                                double level = 1e-3) {
  SeededStream input(derive_seed(seed, 0));
  std::vector<double> t1(n), t2(n), y_tilde(n), ratio(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r1 = triple.r1.draw(input);
    const double r2 = triple.r2.draw(input);
    const double y = triple.y.draw(input);
    const auto [o1, o2] = apply_Thy(h, r1, r2, y);
    t1[i] = o1;
    t2[i] = o2;
    y_tilde[i] = T3(h, r1, r2);
    ratio[i] = r2 / r1;
  }
  SeededStream ref1(derive_seed(seed, 1)), ref2(derive_seed(seed, 2)), ref3(derive_seed(seed, 3));
  const auto r1_ref = triple.r1.sample(ref1, n);
  const auto r2_ref = triple.r2.sample(ref2, n);
  const auto y_ref = triple.y.sample(ref3, n);

  std::vector<TestReport> out;
  out.push_back(ks_two_sample(t1, r1_ref, level, "T1 ~ R1", seed));
  out.push_back(ks_two_sample(t2, r2_ref, level, "T2 ~ R2", seed));
  out.push_back(independence_test(t1, t2, level, "T1 indep T2", seed));
  out.push_back(ks_two_sample(y_tilde, y_ref, level, "T3 ~ Y", seed));
  out.push_back(independence_test(ratio, y_tilde, level, "R2/R1 indep T3", seed));
  return out;
}

enum class Characterization { Lukacs, LukacsCorollary, SeshadriWesolowski };

inline std::string_view characterization_name(Characterization c) {
  switch (c) {
    case Characterization::Lukacs: return "lukacs";
    case Characterization::LukacsCorollary: return "lukacs-corollary";
    case Characterization::SeshadriWesolowski: return "seshadri-wesolowski";
  }
  return "?";
}

inline Characterization parse_characterization(std::string_view name) {
  for (auto c : {Characterization::Lukacs, Characterization::LukacsCorollary,
                 Characterization::SeshadriWesolowski}) {
    if (characterization_name(c) == name) return c;
  }
  throw ParameterError("unknown characterization '" + std::string(name) + "'");
}

/// Hypothesis laws of (A, B) and conclusion laws of (C, D).
struct CharacterizationLaws {
  DistributionSpec a, b, c, d;
};

/*
 * Laws for each theorem, from three positive parameters:
 *   lukacs (lA, lB, beta):   A ~ Ga(lA, beta), B ~ Ga(lB, beta);
 *                            C = A + B ~ Ga(lA + lB, beta), D = A/(A+B) ~ Be(lA, lB)
 *   corollary (lA, lB, beta): A ~ Ga(lA + lB, beta), B ~ Be(lA, lB);
 *                            C = AB ~ Ga(lA, beta), D = A(1-B) ~ Ga(lB, beta)
 *   seshadri-wesolowski (p, q, r): A ~ Be(p, q), B ~ Be(p + q, r);
 *                            C = (1-B)/(1-AB) ~ Be(r, q), D = 1 - AB ~ Be(r + q, p)
 */
inline CharacterizationLaws characterization_laws(Characterization which, double p1, double p2,
                                                  double p3) {
  using D = DistributionSpec;
  switch (which) {
    case Characterization::Lukacs:
      return {D::gamma(p1, p3), D::gamma(p2, p3), D::gamma(p1 + p2, p3), D::beta(p1, p2)};
    case Characterization::LukacsCorollary:
      return {D::gamma(p1 + p2, p3), D::beta(p1, p2), D::gamma(p1, p3), D::gamma(p2, p3)};
    case Characterization::SeshadriWesolowski:
      return {D::beta(p1, p2), D::beta(p1 + p2, p3), D::beta(p3, p2), D::beta(p3 + p2, p1)};
  }
  throw ParameterError("unknown characterization");
}

inline std::pair<double, double> characterization_map(Characterization which, double a, double b) {
  switch (which) {
    case Characterization::Lukacs: return {a + b, a / (a + b)};
    case Characterization::LukacsCorollary: return {a * b, a * (1.0 - b)};
    case Characterization::SeshadriWesolowski: return {(1.0 - b) / (1.0 - a * b), 1.0 - a * b};
  }
  return {0.0, 0.0};
}

/// Samples (A, B) from `laws`, forms (C, D) and tests independence plus both conclusion laws.
inline std::vector<TestReport> characterization_check(Characterization which,
                                                      const CharacterizationLaws& laws,
                                                      std::size_t n, std::uint64_t seed,
                                                      double level = 1e-3) {
  SeededStream input(derive_seed(seed, 0));
  std::vector<double> cs(n), ds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = draw(laws.a, input);
    const double b = draw(laws.b, input);
    std::tie(cs[i], ds[i]) = characterization_map(which, a, b);
  }
  SeededStream ref_c(derive_seed(seed, 1)), ref_d(derive_seed(seed, 2));
  const auto c_ref = sample(laws.c, ref_c, n);
  const auto d_ref = sample(laws.d, ref_d, n);
  const std::string tag(characterization_name(which));
  std::vector<TestReport> out;
  out.push_back(independence_test(cs, ds, level, tag + ": C indep D", seed));
  out.push_back(ks_two_sample(cs, c_ref, level, tag + ": C ~ " + laws.c.to_string(), seed));
  out.push_back(ks_two_sample(ds, d_ref, level, tag + ": D ~ " + laws.d.to_string(), seed));
  return out;
}

inline std::vector<TestReport> characterization_check(Characterization which, double p1, double p2,
                                                      double p3, std::size_t n, std::uint64_t seed,
                                                      double level = 1e-3) {
  return characterization_check(which, characterization_laws(which, p1, p2, p3), n, seed, level);
}

}  // namespace bgpolymer
