#include <gtest/gtest.h>

#include <cmath>

#include "fracppk/fields.hpp"
#include "fracppk/parallel.hpp"
#include "oracles.hpp"

using namespace fracppk;

namespace {

// P(X(A2) = m | X(A1) = n) from independent per-mark Poisson counts on A2 and A1 \ A2.
double conditional_by_enumeration(int k, double lambda, double a1, double a2, int n, int m) {
  const double inner = oracle::order_k_by_enumeration(k, m, lambda * a2);
  const double outer = oracle::order_k_by_enumeration(k, n - m, lambda * (a1 - a2));
  return inner * outer / oracle::order_k_by_enumeration(k, n, lambda * a1);
}

}  // namespace

TEST(Box, MeasureAndContainment) {
  const BoxRegion b{{0.0, 1.0}, {2.0, 4.0}};
  EXPECT_DOUBLE_EQ(b.measure(), 6.0);
  EXPECT_TRUE(b.contains(BoxRegion{{0.5, 1.0}, {2.0, 2.0}}));
  EXPECT_FALSE(b.contains(BoxRegion{{0.5, 0.0}, {2.0, 2.0}}));
  EXPECT_FALSE(b.contains(BoxRegion::unit(3)));
  EXPECT_THROW((BoxRegion{{1.0}, {0.0}}).validate(), DomainError);
  EXPECT_THROW((BoxRegion{{0.0, 0.0}, {1.0}}).validate(), DomainError);
}

TEST(FieldPmf, EqualsPpokAtAreaT) {
  for (int k : {1, 2, 3}) {
    const OrderParams p{k, 0.7};
    for (int n = 0; n <= 20; ++n) EXPECT_EQ(field_pmf(p, 1.7, n), ppok_pmf(p, 1.7, n));
  }
  EXPECT_DOUBLE_EQ(field_pmf({2, 1.0}, 0.0, 0), 1.0);
}

TEST(FieldPmf, Normalized) {
  for (int k : {1, 2, 3}) {
    for (double area : {0.2, 1.0, 2.5}) {
      const OrderParams p{k, 2.0 / k};
      if (k * p.lambda * area > 5.0) continue;
      double total = 0.0;
      for (int n = 0; n <= 60; ++n) total += field_pmf(p, area, n);
      EXPECT_NEAR(total, 1.0, 1e-9) << k << " " << area;
    }
  }
}

TEST(FieldConditional, K1IsBinomial) {
  const OrderParams p{1, 2.0};
  const double a1 = 3.0, a2 = 1.2, q = a2 / a1;
  for (int n : {0, 4, 9}) {
    for (int m = 0; m <= n; ++m) {
      const double binom = std::tgamma(n + 1.0) / (std::tgamma(m + 1.0) * std::tgamma(n - m + 1.0));
      EXPECT_NEAR(field_conditional_pmf(p, a1, a2, n, m), binom * std::pow(q, m) * std::pow(1.0 - q, n - m), 1e-13);
    }
  }
}

TEST(FieldConditional, K2MatchesEnumeration) {
  const OrderParams p{2, 0.8};
  for (int n : {1, 5, 10}) {
    double total = 0.0;
    for (int m = 0; m <= n; ++m) {
      const double got = field_conditional_pmf(p, 2.5, 1.0, n, m);
      EXPECT_NEAR(got, conditional_by_enumeration(2, 0.8, 2.5, 1.0, n, m), 1e-12);
      total += got;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(FieldConditional, EdgeCases) {
  const OrderParams p{2, 1.0};
  EXPECT_DOUBLE_EQ(field_conditional_pmf(p, 1.0, 0.0, 3, 0), 1.0);
  EXPECT_DOUBLE_EQ(field_conditional_pmf(p, 1.0, 1.0, 3, 3), 1.0);
  EXPECT_THROW(field_conditional_pmf(p, 1.0, 2.0, 3, 1), DomainError);
  EXPECT_THROW(field_conditional_pmf(p, 1.0, 0.5, 3, 4), DomainError);
}

TEST(SampleField, PointsInsideAndMarksInRange) {
  RngStream rng(3, 3);
  const BoxRegion box{{-1.0, 2.0, 0.0}, {1.0, 3.0, 0.5}};
  const auto f = sample_field({3, 20.0}, box, rng);
  ASSERT_GT(f.size(), 0u);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_TRUE(box.contains_point(f.point(i)));
    EXPECT_GE(f.marks[i], 1);
    EXPECT_LE(f.marks[i], 3);
  }
  std::int64_t total = 0;
  for (int m : f.marks) total += m;
  EXPECT_EQ(count_in_region(f, box), total);
}

TEST(SampleField, EmptyBoxGivesEmptyField) {
  RngStream rng(3, 3);
  const auto f = sample_field({2, 1.0}, BoxRegion{{0.0, 0.0}, {1.0, 0.0}}, rng);
  EXPECT_EQ(f.size(), 0u);
}

TEST(SampleField, QueryOutsideAmbientRejected) {
  RngStream rng(3, 3);
  const auto f = sample_field({2, 1.0}, BoxRegion::unit(2), rng);
  EXPECT_THROW(count_in_region(f, BoxRegion{{0.5, 0.5}, {1.5, 1.0}}), DomainError);
}

TEST(SampleField, MeanPointCount) {
  // d = 2 unit box with k lambda = 3.
  const std::size_t runs = 10'000;
  const auto sizes = parallel_draws<double>(runs, 12, 1, [&](RngStream& rng, std::size_t) {
    return static_cast<double>(sample_field({3, 1.0}, BoxRegion::unit(2), rng).size());
  });
  double m = 0.0;
  for (double s : sizes) m += s;
  m /= runs;
  EXPECT_LT(std::fabs(m - 3.0), 3.0 * std::sqrt(3.0 / runs));
}

TEST(FieldMoments, Formulas) {
  const auto m = field_moments({3, 0.5}, 2.0);
  EXPECT_DOUBLE_EQ(m.mean, 6.0);
  EXPECT_DOUBLE_EQ(m.variance, 14.0);
}

TEST(FractionalField, OneAxisMatchesTfPmf) {
  const OrderParams p{2, 1.0};
  const ClockVector clock{ClockVariant::TimeFractional, {0.7}, {1.0}};
  const auto est = fractional_field_pmf_all(p, clock, 6, 40'000, 17);
  for (int n = 0; n <= 6; ++n) {
    const auto& e = est[static_cast<std::size_t>(n)];
    EXPECT_LT(std::fabs(e.value - tfppok_pmf(p, 0.7, 1.0, n)), 4.0 * e.std_error + 1e-12) << n;
  }
}

TEST(FractionalField, OneAxisMatchesSfPmf) {
  const OrderParams p{2, 1.0};
  const ClockVector clock{ClockVariant::SpaceFractional, {0.7}, {1.0}};
  const auto est = fractional_field_pmf_all(p, clock, 6, 40'000, 18);
  for (int n = 0; n <= 6; ++n) {
    const auto& e = est[static_cast<std::size_t>(n)];
    EXPECT_LT(std::fabs(e.value - sfppok_pmf(p, 0.7, 1.0, n)), 4.0 * e.std_error + 1e-12) << n;
  }
}

TEST(FractionalField, Validation) {
  EXPECT_THROW((ClockVector{ClockVariant::TimeFractional, {1.0}, {1.0}}).validate(), DomainError);
  EXPECT_THROW((ClockVector{ClockVariant::TimeFractional, {0.5}, {}}).validate(), DomainError);
  EXPECT_THROW(fractional_field_moments({2, 1.0}, {ClockVariant::SpaceFractional, {0.5}, {1.0}}), DomainError);
}

TEST(FractionalField, TwoAxisMomentsMatchSampler) {
  const OrderParams p{2, 1.0};
  const ClockVector clock{ClockVariant::TimeFractional, {0.6, 0.8}, {1.0, 1.5}};
  const auto want = fractional_field_moments(p, clock);
  const std::size_t n = 60'000;
  const auto xs = parallel_draws<double>(n, 19, 2, [&](RngStream& rng, std::size_t) {
    return static_cast<double>(sample_fractional_field(p, clock, rng));
  });
  long double a = 0, b = 0;
  for (double x : xs) {
    a += x;
    b += x * x;
  }
  const double m = static_cast<double>(a / n), v = static_cast<double>(b / n) - m * m;
  EXPECT_LT(std::fabs(m - want.mean), 4.0 * std::sqrt(v / n));
  EXPECT_NEAR(v / want.variance, 1.0, 0.1);
}
