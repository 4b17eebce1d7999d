#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bgpolymer/errors.hpp"
#include "bgpolymer/models.hpp"
#include "bgpolymer/numeric.hpp"
#include "bgpolymer/parallel.hpp"
#include "bgpolymer/rng.hpp"
#include "bgpolymer/stats.hpp"

namespace bgpolymer {

/*
 * Log edge weights on {0..m} x {0..n}. The edge entering (i, j) from the left
 * carries R1_{i,0} on the horizontal axis (j = 0) and u_{i,j} in the bulk; the
 * edge entering from below carries R2_{0,j} on the vertical axis (i = 0) and
 * v_{i,j} in the bulk.
 */
struct EdgeWeights {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> log_r1_axis;  // R1_{i,0}, i = 1..m
  std::vector<double> log_r2_axis;  // R2_{0,j}, j = 1..n
  std::vector<double> log_u;        // u_{i,j}, row-major over i = 1..m, j = 1..n
  std::vector<double> log_v;        // v_{i,j}

  EdgeWeights() = default;
  EdgeWeights(std::size_t m_, std::size_t n_)
      : m(m_), n(n_), log_r1_axis(m_), log_r2_axis(n_), log_u(m_ * n_), log_v(m_ * n_) {}

  /// Every weight equal to one; Z_{m,n} then counts up-right paths.
  static EdgeWeights all_ones(std::size_t m, std::size_t n) { return EdgeWeights(m, n); }

  std::size_t bulk_index(std::size_t i, std::size_t j) const { return (i - 1) * n + (j - 1); }

  /// Log weight of the edge entering (i, j) from (i-1, j).
  double log_horizontal(std::size_t i, std::size_t j) const {
    return j == 0 ? log_r1_axis[i - 1] : log_u[bulk_index(i, j)];
  }
  /// Log weight of the edge entering (i, j) from (i, j-1).
  double log_vertical(std::size_t i, std::size_t j) const {
    return i == 0 ? log_r2_axis[j - 1] : log_v[bulk_index(i, j)];
  }
};

/*
 * Log ratio field: logR1(i, j) = log Z_{i,j} - log Z_{i-1,j} for i = 1..m,
 * j = 0..n, and logR2(i, j) = log Z_{i,j} - log Z_{i,j-1} for i = 0..m, j = 1..n.
 */
struct LatticeField {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> log_r1;  // m x (n + 1)
  std::vector<double> log_r2;  // (m + 1) x n
  EdgeWeights weights;
  std::uint64_t seed = 0;
  std::optional<ModelSpec> model;

  double logR1(std::size_t i, std::size_t j) const { return log_r1[(i - 1) * (n + 1) + j]; }
  double logR2(std::size_t i, std::size_t j) const { return log_r2[i * n + (j - 1)]; }
  double& logR1(std::size_t i, std::size_t j) { return log_r1[(i - 1) * (n + 1) + j]; }
  double& logR2(std::size_t i, std::size_t j) { return log_r2[i * n + (j - 1)]; }
};

/*
 * Fills the ratio field from the edge weights through
 *   R1_x = u_x + v_x R1_{x-a2} / R2_{x-a1},   R2_x = u_x R2_{x-a1} / R1_{x-a2} + v_x,
 * sweeping x lexicographically. Everything stays in log space; sums go
 * through log_add_exp.
 */
inline LatticeField sweep(EdgeWeights weights) {
  const std::size_t m = weights.m;
  const std::size_t n = weights.n;
  if (m == 0 || n == 0) throw ParameterError("lattice extents must be at least 1");
  LatticeField f;
  f.m = m;
  f.n = n;
  f.log_r1.assign(m * (n + 1), 0.0);
  f.log_r2.assign((m + 1) * n, 0.0);
  for (std::size_t i = 1; i <= m; ++i) f.logR1(i, 0) = weights.log_r1_axis[i - 1];
  for (std::size_t j = 1; j <= n; ++j) f.logR2(0, j) = weights.log_r2_axis[j - 1];

  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double lu = weights.log_u[weights.bulk_index(i, j)];
      const double lv = weights.log_v[weights.bulk_index(i, j)];
      const double below = f.logR1(i, j - 1);  // R1_{x - a2}
      const double left = f.logR2(i - 1, j);   // R2_{x - a1}
      const double r1 = log_add_exp(lu, lv + below - left);
      const double r2 = log_add_exp(lu + left - below, lv);
      if (!std::isfinite(r1) || !std::isfinite(r2)) {
        throw NumericError("non-finite log ratio", static_cast<long>(i), static_cast<long>(j));
      }
      f.logR1(i, j) = r1;
      f.logR2(i, j) = r2;
    }
  }
  f.weights = std::move(weights);
  return f;
}

/*
 * Draws the boundary and bulk weights of `model` on an m x n box and sweeps.
 * Draw order from a single stream seeded with `seed`: R1_{1..m,0}, then
 * R2_{0,1..n}, then Y_{i,j} row-major. Bulk pairs are (u, v) = (Y, h(Y)).
 * The InvariantModel overload takes the triple as given (negative controls
 * pass deliberately wrong ones).
 */
inline LatticeField simulate_field(const InvariantModel& im, std::size_t m, std::size_t n,
                                   std::uint64_t seed) {
  if (m == 0 || n == 0) throw ParameterError("lattice extents must be at least 1");
  SeededStream rng(seed);
  EdgeWeights w(m, n);
  for (auto& x : w.log_r1_axis) x = std::log(im.triple.r1.draw(rng));
  for (auto& x : w.log_r2_axis) x = std::log(im.triple.r2.draw(rng));
  for (std::size_t k = 0; k < m * n; ++k) {
    const double y = im.triple.y.draw(rng);
    w.log_u[k] = std::log(y);
    w.log_v[k] = std::log(im.h(y));
  }
  LatticeField f = sweep(std::move(w));
  f.seed = seed;
  return f;
}

inline LatticeField simulate_field(const ModelSpec& model, std::size_t m, std::size_t n,
                                   std::uint64_t seed) {
  LatticeField f = simulate_field(invariant_model(model), m, n, seed);
  f.model = model;
  return f;
}

/// log Z_{mp,np}: up the vertical axis to (0, np), then along row np.
inline double log_Z(const LatticeField& f, std::size_t mp, std::size_t np) {
  if (mp > f.m || np > f.n) throw std::out_of_range("log_Z: site outside the field");
  double total = 0.0;
  for (std::size_t j = 1; j <= np; ++j) total += f.logR2(0, j);
  for (std::size_t i = 1; i <= mp; ++i) total += f.logR1(i, np);
  return total;
}

/// log Z at the end of an up-right path from the origin; steps are 'R' (right) or 'U' (up).
inline double log_Z_along(const LatticeField& f, std::string_view steps) {
  std::size_t i = 0, j = 0;
  double total = 0.0;
  for (char step : steps) {
    if (step == 'R') {
      if (++i > f.m) throw std::out_of_range("path leaves the field");
      total += f.logR1(i, j);
    } else if (step == 'U') {
      if (++j > f.n) throw std::out_of_range("path leaves the field");
      total += f.logR2(i, j);
    } else {
      throw ParameterError("path steps must be 'R' or 'U'");
    }
  }
  return total;
}

inline constexpr std::size_t kBruteForceMaxSteps = 20;

/*
 * log Z_{m,n} by enumerating every up-right path from (0,0) to (m,n) and
 * log-sum-exp'ing the path log weights. Independent of the ratio recursion.
 */
inline double brute_force_logZ(const EdgeWeights& w, std::size_t m, std::size_t n) {
  if (m + n > kBruteForceMaxSteps) throw ParameterError("brute_force_logZ: m + n exceeds 20");
  if (m > w.m || n > w.n) throw std::out_of_range("brute_force_logZ: target outside the weights");
  if (m == 0 && n == 0) return 0.0;
  std::vector<double> path_weights;
  auto walk = [&](auto&& self, std::size_t i, std::size_t j, double acc) -> void {
    if (i == m && j == n) {
      path_weights.push_back(acc);
      return;
    }
    if (i < m) self(self, i + 1, j, acc + w.log_horizontal(i + 1, j));
    if (j < n) self(self, i, j + 1, acc + w.log_vertical(i, j + 1));
  };
  walk(walk, 0, 0, 0.0);
  return log_sum_exp(path_weights);
}

struct Site {
  std::size_t i;
  std::size_t j;
};

struct RatioSample {
  std::size_t replica;
  double r1;
  double r2;
};

/// Seed of replica `k`; independent fields per replica.
inline std::uint64_t replica_seed(std::uint64_t base_seed, std::size_t k) {
  return derive_seed(base_seed, k);
}

/// (R1_x, R2_x) from `replicas` independent fields, each simulated on the box [0, i] x [0, j].
inline std::vector<RatioSample> interior_ratio_samples(const InvariantModel& model, Site x,
                                                       std::size_t replicas, std::uint64_t seed,
                                                       unsigned workers = 0) {
  if (replicas == 0) throw ParameterError("replicas must be at least 1");
  if (x.i == 0 || x.j == 0) throw ParameterError("site must be interior (i, j >= 1)");
  std::vector<RatioSample> out(replicas);
  parallel_for(
      replicas,
      [&](std::size_t k) {
        const LatticeField f = simulate_field(model, x.i, x.j, replica_seed(seed, k));
        out[k] = {k, std::exp(f.logR1(x.i, x.j)), std::exp(f.logR2(x.i, x.j))};
      },
      workers);
  return out;
}

inline std::vector<RatioSample> interior_ratio_samples(const ModelSpec& model, Site x,
                                                       std::size_t replicas, std::uint64_t seed,
                                                       unsigned workers = 0) {
  return interior_ratio_samples(invariant_model(model), x, replicas, seed, workers);
}

/// log Z_{m,n} from `replicas` independent fields.
inline std::vector<double> log_Z_samples(const InvariantModel& model, std::size_t m, std::size_t n,
                                         std::size_t replicas, std::uint64_t seed,
                                         unsigned workers = 0) {
  if (replicas == 0) throw ParameterError("replicas must be at least 1");
  std::vector<double> out(replicas);
  parallel_for(
      replicas,
      [&](std::size_t k) { out[k] = log_Z(simulate_field(model, m, n, replica_seed(seed, k)), m, n); },
      workers);
  return out;
}

inline std::vector<double> log_Z_samples(const ModelSpec& model, std::size_t m, std::size_t n,
                                         std::size_t replicas, std::uint64_t seed,
                                         unsigned workers = 0) {
  return log_Z_samples(invariant_model(model), m, n, replicas, seed, workers);
}

/// E[log Z_{m,n}] = m E[log R1] + n E[log R2] under stationarity.
inline double expected_log_Z(const StationaryTriple& t, std::size_t m, std::size_t n) {
  return static_cast<double>(m) * t.r1.expected_log() + static_cast<double>(n) * t.r2.expected_log();
}

inline double expected_log_Z(const ModelSpec& model, std::size_t m, std::size_t n) {
  return expected_log_Z(stationary_triple(model), m, n);
}

/*
 * KS of interior (R1_x, R2_x) against fresh draws from the boundary laws.
 * Replica fields use derive_seed(seed, k); reference draws come from
 * derive_seed(seed ^ x-tag, .) streams so they never share a stream with a replica.
 */
inline std::vector<TestReport> stationarity_check(const InvariantModel& model, Site x, std::size_t replicas,
                                                  std::uint64_t seed, double level = 1e-3,
                                                  unsigned workers = 0) {
  const auto samples = interior_ratio_samples(model, x, replicas, seed, workers);
  std::vector<double> r1(replicas), r2(replicas);
  for (std::size_t k = 0; k < replicas; ++k) {
    r1[k] = samples[k].r1;
    r2[k] = samples[k].r2;
  }
  const StationaryTriple& t = model.triple;
  const std::uint64_t ref_seed = derive_seed(~seed, x.i * 1000003 + x.j);
  SeededStream ref1(derive_seed(ref_seed, 1)), ref2(derive_seed(ref_seed, 2));
  const auto r1_ref = t.r1.sample(ref1, replicas);
  const auto r2_ref = t.r2.sample(ref2, replicas);
  const std::string at = " at (" + std::to_string(x.i) + "," + std::to_string(x.j) + ")";
  return {ks_two_sample(r1, r1_ref, level, "R1" + at + " ~ " + t.r1.to_string(), seed),
          ks_two_sample(r2, r2_ref, level, "R2" + at + " ~ " + t.r2.to_string(), seed)};
}

/*
 * Empirical mean of log Z_{m,n} against m E[log R1] + n E[log R2]; passes when
 * the gap is within `max_se` standard errors. statistic = gap / SE.
 */
inline TestReport log_Z_mean_check(const InvariantModel& model, std::size_t m, std::size_t n,
                                   std::size_t replicas, std::uint64_t seed, double max_se = 4.0,
                                   unsigned workers = 0) {
  if (replicas < 2) throw ParameterError("log_Z_mean_check needs at least 2 replicas");
  const auto zs = log_Z_samples(model, m, n, replicas, seed, workers);
  double mean = 0.0;
  for (double z : zs) mean += z;
  mean /= static_cast<double>(replicas);
  double var = 0.0;
  for (double z : zs) var += (z - mean) * (z - mean);
  var /= static_cast<double>(replicas - 1);
  const double se = std::sqrt(var / static_cast<double>(replicas));
  const double expected = expected_log_Z(model.triple, m, n);
  TestReport r;
  r.name = "E log Z(" + std::to_string(m) + "," + std::to_string(n) + ")";
  r.statistic = std::abs(mean - expected) / se;
  r.threshold = max_se;
  r.p_value = std::erfc(r.statistic / std::sqrt(2.0));
  r.n1 = replicas;
  r.seed = seed;
  r.pass = r.statistic < max_se;
  r.detail = "mean=" + std::to_string(mean) + " expected=" + std::to_string(expected) +
             " se=" + std::to_string(se);
  return r;
}

inline std::vector<TestReport> stationarity_check(const ModelSpec& model, Site x, std::size_t replicas,
                                                  std::uint64_t seed, double level = 1e-3,
                                                  unsigned workers = 0) {
  return stationarity_check(invariant_model(model), x, replicas, seed, level, workers);
}

inline TestReport log_Z_mean_check(const ModelSpec& model, std::size_t m, std::size_t n,
                                   std::size_t replicas, std::uint64_t seed, double max_se = 4.0,
                                   unsigned workers = 0) {
  return log_Z_mean_check(invariant_model(model), m, n, replicas, seed, max_se, workers);
}

namespace detail {
inline void write_number(std::ostream& out, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.write(buf, res.ptr - buf);
}
}  // namespace detail

/// CSV with columns site_i,site_j,replica,R1,R2; '.' decimal regardless of locale.
inline void write_ratio_csv(std::ostream& out, Site x, std::span<const RatioSample> samples) {
  out << "site_i,site_j,replica,R1,R2\n";
  for (const auto& s : samples) {
    out << x.i << ',' << x.j << ',' << s.replica << ',';
    detail::write_number(out, s.r1);
    out << ',';
    detail::write_number(out, s.r2);
    out << '\n';
  }
}

}  // namespace bgpolymer
