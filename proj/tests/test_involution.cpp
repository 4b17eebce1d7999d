#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bgpolymer/involution.hpp"
#include "bgpolymer/rng.hpp"
#include "bgpolymer/verify.hpp"

using namespace bgpolymer;

namespace {

const std::vector<std::pair<double, double>> kCanonical{{0, 1}, {1, 0}, {1, -1}, {-1, 1}, {1, 1}};

void expect_point_near(const InvolutionPoint& got, const InvolutionPoint& want, double tol) {
  EXPECT_NEAR(got.r1, want.r1, tol);
  EXPECT_NEAR(got.r2, want.r2, tol);
  EXPECT_NEAR(got.y, want.y, tol);
}

}  // namespace

TEST(LinearH, RequiresPositiveMax) {
  EXPECT_THROW(LinearH(0, 0), ParameterError);
  EXPECT_THROW(LinearH(-1, -0.5), ParameterError);
  EXPECT_NO_THROW(LinearH(-1, 1));
  EXPECT_DOUBLE_EQ(LinearH(2, -1)(0.5), 1.5);
}

TEST(ApplyThy, WorkedPoints) {
  const auto [a1, a2] = apply_Thy(LinearH{0, 1}, 1, 1, 1);
  EXPECT_DOUBLE_EQ(a1, 2.0);
  EXPECT_DOUBLE_EQ(a2, 2.0);
  const auto [b1, b2] = apply_Thy(LinearH{1, 0}, 2, 3, 0.5);
  EXPECT_DOUBLE_EQ(b1, 7.0 / 6);
  EXPECT_DOUBLE_EQ(b2, 7.0 / 4);
  EXPECT_THROW(apply_Thy(LinearH{1, -1}, 1, 1, 2), DomainError);  // h(2) = -1
}

TEST(ApplyThy, PreservesRatio) {
  SeededStream rng(4);
  const LinearH h{0.5, 2};
  for (int k = 0; k < 1000; ++k) {
    const double r1 = 0.1 + 10 * rng.uniform(), r2 = 0.1 + 10 * rng.uniform(), y = 10 * rng.uniform();
    const auto [o1, o2] = apply_Thy(h, r1, r2, y);
    EXPECT_NEAR(o2 / o1, r2 / r1, 1e-15 * r2 / r1);
  }
}

TEST(ApplyG, WorkedPoints) {
  const auto [r1, r2] = apply_G(LinearH{1, -1}, 2, 0.5);
  EXPECT_DOUBLE_EQ(r1, 0.75);
  EXPECT_DOUBLE_EQ(r2, 1.5);
  const auto [q1, q2] = apply_G(LinearH{0, 1}, 1, 0.8);
  EXPECT_DOUBLE_EQ(q1, 1.6);
  EXPECT_DOUBLE_EQ(q2, 1.6);
  EXPECT_THROW(apply_G(LinearH{0, 1}, 0, 1), DomainError);
}

TEST(InvertG, WorkedPoints) {
  // G^{-1}(2, 3) is the (s, y~) of the worked T(2, 3, 1/2) = (7/6, 7/4, 4/3)
  const auto [s, yt] = invert_G(LinearH{1, 0}, 2, 3);
  EXPECT_DOUBLE_EQ(s, 1.5);
  EXPECT_DOUBLE_EQ(yt, 4.0 / 3);
  // and G^{-1}(7/6, 7/4) recovers the original y = 1/2
  const auto [s2, y2] = invert_G(LinearH{1, 0}, 7.0 / 6, 7.0 / 4);
  EXPECT_DOUBLE_EQ(s2, 1.5);
  EXPECT_NEAR(y2, 0.5, 1e-15);

  const auto [s3, y3] = invert_G(LinearH{0, 1}, 2.5, 2.5);
  EXPECT_DOUBLE_EQ(s3, 1.0);
  EXPECT_DOUBLE_EQ(y3, 1.25);
}

TEST(InvertG, SingularAndOutsideImage) {
  EXPECT_THROW(invert_G(LinearH{1, -1}, 2, 2), SingularityError);  // r2 + b r1 = 0
  EXPECT_THROW(invert_G(LinearH{1, 0}, 2, 0.5), DomainError);     // y~ < 0
}

TEST(InvertG, RoundTrip) {
  SeededStream rng(8);
  for (auto [a, b] : kCanonical) {
    const LinearH h{a, b};
    const DomainSpec d{DomainSign::plus, a, b};
    for (int k = 0; k < 1000; ++k) {
      const InvolutionPoint p = random_domain_point(d, rng);
      const auto [r1, r2] = apply_G(h, p.ratio(), p.y);
      const auto [s, y] = invert_G(h, r1, r2);
      EXPECT_NEAR(s, p.ratio(), 1e-12 * p.ratio());
      EXPECT_NEAR(y, p.y, 1e-12 * std::max(1.0, p.y));
    }
  }
}

TEST(ApplyTab, WorkedPoints) {
  const InvolutionPoint t = apply_Tab(1, 0, {2, 3, 0.5});
  expect_point_near(t, {7.0 / 6, 7.0 / 4, 4.0 / 3}, 1e-15);
  expect_point_near(apply_Tab(1, 0, t), {2, 3, 0.5}, 1e-15);
  expect_point_near(apply_Tab(0, 1, {1.7, 1.7, 0.3}), {0.6, 0.6, 0.85}, 1e-15);
  EXPECT_THROW(apply_Tab(1, 0, {2, 0.5, 1}), DomainError);  // r2 < a
}

TEST(ApplyTab, FactoredFormAgrees) {
  SeededStream rng(9);
  for (auto [a, b] : kCanonical) {
    for (auto sign : {DomainSign::plus, DomainSign::minus}) {
      const DomainSpec d{sign, a, b};
      if (d.empty()) continue;
      for (int k = 0; k < 500; ++k) {
        const InvolutionPoint p = random_domain_point(d, rng);
        const InvolutionPoint direct = apply_Tab(LinearH{a, b}, p);
        const InvolutionPoint factored = apply_T_factored(LinearH{a, b}, p);
        EXPECT_NEAR(direct.r1, factored.r1, 1e-12 * direct.r1);
        EXPECT_NEAR(direct.r2, factored.r2, 1e-12 * direct.r2);
        EXPECT_NEAR(direct.y, factored.y, 1e-12 * direct.y);
      }
    }
  }
}

TEST(ApplyTab, MapsDomainIntoItself) {
  SeededStream rng(10);
  for (auto [a, b] : kCanonical) {
    for (auto sign : {DomainSign::plus, DomainSign::minus}) {
      const DomainSpec d{sign, a, b};
      if (d.empty()) continue;
      for (int k = 0; k < 10000; ++k) {
        const InvolutionPoint p = random_domain_point(d, rng);
        ASSERT_TRUE(d.contains(apply_Tab(LinearH{a, b}, p))) << to_string(p);
      }
    }
  }
}

TEST(Involution, ExactnessOnCanonicalDomains) {
  for (auto [a, b] : kCanonical) {
    const auto r = involution_check({DomainSign::plus, a, b}, 10000, 12);
    EXPECT_LT(r.max_roundtrip, 1e-10) << a << "," << b;
    EXPECT_LT(r.max_ratio, 1e-14) << a << "," << b;
  }
  const auto r = involution_check({DomainSign::minus, 1, -1}, 10000, 13);
  EXPECT_LT(r.max_roundtrip, 1e-10);
}

TEST(Domain, Membership) {
  EXPECT_TRUE(DomainSpec({DomainSign::minus, 1, 0}).empty());
  EXPECT_TRUE(domain_membership({DomainSign::plus, 1, 0}, {1, 2, 5}));
  EXPECT_TRUE(domain_membership({DomainSign::plus, 1, -1}, {0.5, 2, 0.3}));
  EXPECT_FALSE(domain_membership({DomainSign::plus, 1, -1}, {1.5, 2, 0.3}));
  EXPECT_FALSE(domain_membership({DomainSign::plus, -1, 1}, {1.0, 2, 3}));
  EXPECT_FALSE(domain_membership({DomainSign::plus, -1, 1}, {0.4, 2, 3}));
  EXPECT_TRUE(domain_membership({DomainSign::plus, -1, 1}, {1.01, 0.2, 3}));
  // D^-_{1,-1} = (1, inf) x (0, 1) x (0, 1)
  const auto sets = DomainSpec({DomainSign::minus, 1, -1}).intervals();
  EXPECT_EQ(sets[0].lo, 1.0);
  EXPECT_EQ(sets[1].hi, 1.0);
  EXPECT_EQ(sets[2].hi, 1.0);
}

TEST(Domain, RandomPointsOnSmallDomains) {
  // W^+ for (a, b) = (0.01, -2) is (0, 0.005)
  SeededStream rng(14);
  const DomainSpec d{DomainSign::plus, 0.01, -2};
  for (int k = 0; k < 1000; ++k) ASSERT_TRUE(d.contains(random_domain_point(d, rng)));
  EXPECT_THROW(random_domain_point({DomainSign::minus, 0, 1}, rng), DomainError);
}

TEST(LFunction, Values) {
  EXPECT_DOUBLE_EQ(L(3, 0.2, LinearH{1, -1}), 2.0);
  EXPECT_DOUBLE_EQ(L(2, 0.7, LinearH{0, 1}), 3.0);
}

TEST(Jacobian, WorkedDeterminant) {
  const Jacobian3 j = jacobian_T(1, 0, {2, 3, 0.5});
  EXPECT_NEAR(j.det, -7.0 / 12, 1e-15);
  EXPECT_NEAR(determinant(j.matrix), -7.0 / 12, 1e-14);
}

TEST(Jacobian, MatchesFiniteDifferences) {
  for (auto [a, b] : kCanonical) {
    const auto r = jacobian_check({DomainSign::plus, a, b}, 1000, 15);
    EXPECT_LT(r.max_entry, 1e-6) << a << "," << b;
    EXPECT_LT(r.max_det, 1e-5) << a << "," << b;
    EXPECT_EQ(r.zero_violations, 0u);
  }
}

TEST(Jacobian, GBlocks) {
  const LinearH h{1, -1};
  const double s = 2, y = 0.5;
  const Jacobian2 dg = jacobian_G(h, s, y);
  EXPECT_NEAR(dg.det, dg.matrix[0][0] * dg.matrix[1][1] - dg.matrix[0][1] * dg.matrix[1][0], 1e-15);
  const auto [r1, r2] = apply_G(h, s, y);
  const Jacobian2 dgi = jacobian_G_inverse(h, r1, r2);
  // DG^{-1}(G(s, y)) DG(s, y) = I
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      double v = 0;
      for (int t = 0; t < 2; ++t) v += dgi.matrix[i][t] * dg.matrix[t][k];
      EXPECT_NEAR(v, i == k ? 1.0 : 0.0, 1e-14);
    }
  }
  EXPECT_NEAR(dgi.det * dg.det, 1.0, 1e-14);
}
