#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bgpolymer/stats.hpp"
#include "bgpolymer/verify.hpp"

using namespace bgpolymer;

namespace {

std::vector<double> uniforms(SeededStream& rng, std::size_t n) {
  std::vector<double> xs(n);
  for (auto& x : xs) x = rng.uniform();
  return xs;
}

StationaryTriple perturbed(StationaryTriple t, double factor) {
  t.y = perturb_shape(t.y, 1, (factor - 1.0) * t.y.base().shape1());
  return t;
}

}  // namespace

TEST(Ks, CriticalValue) {
  // c(0.001) = sqrt(-0.5 ln 0.0005) = 1.9495...
  EXPECT_NEAR(ks_critical_value(100000, 100000, 1e-3), 1.94947 * std::sqrt(2e-5), 1e-6);
}

TEST(Ks, IdenticalSamples) {
  const std::vector<double> xs{3, 1, 2, 2, 5};
  const auto r = ks_two_sample(xs, xs, 1e-3);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_TRUE(r.pass);
  EXPECT_THROW(ks_two_sample(std::vector<double>{}, xs, 1e-3), ParameterError);
}

TEST(Ks, StatisticByHand) {
  const std::vector<double> xs{1, 2, 3, 4};
  const std::vector<double> ys{3, 4, 5, 6};
  EXPECT_DOUBLE_EQ(ks_statistic(xs, ys), 0.5);
}

TEST(Ks, SameLawPasses) {
  SeededStream a(1), b(2);
  const auto xs = sample(DistributionSpec::gamma(2, 1), a, 100000);
  const auto ys = sample(DistributionSpec::gamma(2, 1), b, 100000);
  EXPECT_TRUE(ks_two_sample(xs, ys, 1e-3).pass);
}

TEST(Ks, DifferentLawFails) {
  SeededStream a(1), b(2);
  const auto xs = sample(DistributionSpec::gamma(2, 1), a, 100000);
  const auto ys = sample(DistributionSpec::gamma(2.5, 1), b, 100000);
  EXPECT_FALSE(ks_two_sample(xs, ys, 1e-3).pass);
}

TEST(Ks, FalsePositiveRate) {
  int passes = 0;
  for (int rep = 0; rep < 100; ++rep) {
    SeededStream a(derive_seed(500, 2 * rep)), b(derive_seed(500, 2 * rep + 1));
    const auto xs = sample(DistributionSpec::gamma(2, 1), a, 20000);
    const auto ys = sample(DistributionSpec::gamma(2, 1), b, 20000);
    passes += ks_two_sample(xs, ys, 1e-3).pass ? 1 : 0;
  }
  EXPECT_GE(passes, 99);
}

TEST(Ranks, MidRanksForTies) {
  const std::vector<double> xs{10, 20, 20, 5};
  EXPECT_EQ(ranks(xs), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Independence, UniformPairsPass) {
  SeededStream rng(3);
  const auto xs = uniforms(rng, 20000);
  const auto ys = uniforms(rng, 20000);
  EXPECT_TRUE(independence_test(xs, ys, 1e-3).pass);
}

TEST(Independence, SquaredPairsFail) {
  SeededStream rng(4);
  const auto xs = uniforms(rng, 20000);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = xs[i] * xs[i];
  EXPECT_FALSE(independence_test(xs, ys, 1e-3).pass);
}

TEST(Independence, NonMonotoneDependenceFails) {
  // zero rank correlation but dependent: caught by the chi-square grid
  SeededStream rng(5);
  const auto xs = uniforms(rng, 20000);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = std::abs(xs[i] - 0.5) + 0.01 * rng.uniform();
  EXPECT_FALSE(independence_test(xs, ys, 1e-3).pass);
}

TEST(Independence, Preconditions) {
  const std::vector<double> few(999, 1.0);
  EXPECT_THROW(independence_test(few, few, 1e-3), ParameterError);
  SeededStream rng(6);
  const auto xs = uniforms(rng, 2000);
  const std::vector<double> flat(2000, 1.0);
  EXPECT_THROW(independence_test(xs, flat, 1e-3), ParameterError);
}

TEST(InvarianceSuite, BasicModelsPass) {
  for (auto m : {BasicModel::LogGamma, BasicModel::InverseBeta}) {
    const auto im = invariant_model(preset(m));
    const auto reports = invariance_suite(im.triple, im.h, 100000, 20240601);
    ASSERT_EQ(reports.size(), 5u);
    for (const auto& r : reports) EXPECT_TRUE(r.pass) << basic_model_name(m) << ": " << r.name;
  }
}

TEST(InvarianceSuite, SwappedLogGammaLawsPass) {
  // h(y) = y is symmetric in (r1, r2): exchanging the R laws keeps invariance
  const auto im = invariant_model(preset(BasicModel::LogGamma, 3, 1, 1));
  const StationaryTriple swapped{im.triple.r2, im.triple.r1, im.triple.y};
  EXPECT_TRUE(all_pass(invariance_suite(swapped, im.h, 100000, 7)));
}

TEST(InvarianceSuite, RateMismatchFails) {
  const auto im = invariant_model(preset(BasicModel::LogGamma, 3, 1, 1));
  const StationaryTriple wrong{im.triple.r1, AffineLaw(DistributionSpec::inverse_gamma(1, 2)), im.triple.y};
  EXPECT_FALSE(all_pass(invariance_suite(wrong, im.h, 100000, 7)));
}

TEST(InvarianceSuite, PerturbedYFails) {
  const auto im = invariant_model(preset(BasicModel::StrictWeak));
  EXPECT_FALSE(all_pass(invariance_suite(perturbed(im.triple, 1.25), im.h, 100000, 8)));
}

TEST(InvarianceSuite, Reproducible) {
  const auto im = invariant_model(preset(BasicModel::Beta));
  const auto a = invariance_suite(im.triple, im.h, 5000, 9);
  const auto b = invariance_suite(im.triple, im.h, 5000, 9);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].statistic, b[k].statistic);
}

TEST(Characterization, Laws) {
  const auto l = characterization_laws(Characterization::Lukacs, 2, 3, 1);
  EXPECT_EQ(l.c, DistributionSpec::gamma(5, 1));
  EXPECT_EQ(l.d, DistributionSpec::beta(2, 3));
  const auto s = characterization_laws(Characterization::SeshadriWesolowski, 1, 1, 1);
  EXPECT_EQ(s.c, DistributionSpec::beta(1, 1));
  EXPECT_EQ(parse_characterization("lukacs-corollary"), Characterization::LukacsCorollary);
  EXPECT_THROW(parse_characterization("bernstein"), ParameterError);
}

TEST(Characterization, ForwardDirectionsPass) {
  for (auto which : {Characterization::Lukacs, Characterization::LukacsCorollary,
                     Characterization::SeshadriWesolowski}) {
    const double p1 = which == Characterization::SeshadriWesolowski ? 1.0 : 2.0;
    const double p2 = which == Characterization::SeshadriWesolowski ? 1.0 : 3.0;
    const auto r = characterization_check(which, p1, p2, 1, 100000, 31);
    EXPECT_TRUE(all_pass(r)) << characterization_name(which);
  }
}

TEST(Characterization, MismatchedRatesFail) {
  auto laws = characterization_laws(Characterization::Lukacs, 2, 3, 1);
  laws.b = DistributionSpec::gamma(3, 2);
  const auto r = characterization_check(Characterization::Lukacs, laws, 100000, 32);
  EXPECT_FALSE(r[0].pass);  // C and D dependent
}
