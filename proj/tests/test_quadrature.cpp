#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wradon/quadrature.hpp"

using namespace wradon;

TEST(GaussRule, IntegratesPolynomialsExactly) {
  for (int n : {2, 5, 16, 33}) {
    const GaussRule& g = gauss_rule(n);
    ASSERT_EQ(g.nodes.size(), static_cast<std::size_t>(n));
    double wsum = 0.0;
    for (double w : g.weights) wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-14);
    // x^(2n-2) integrates to 2 / (2n - 1)
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += g.weights[i] * std::pow(g.nodes[i], 2 * n - 2);
    EXPECT_NEAR(q, 2.0 / (2 * n - 1), 1e-13) << n;
  }
}

TEST(PairwiseSum, MatchesCompensatedReference) {
  std::vector<double> xs;
  for (int i = 1; i <= 100000; ++i) xs.push_back(1.0 / i);
  long double ref = 0.0L;
  for (double x : xs) ref += x;
  EXPECT_NEAR(pairwise_sum(xs), static_cast<double>(ref), 1e-12);
  EXPECT_EQ(pairwise_sum(std::span<const double>{}), 0.0);
}

TEST(Integrate, SmoothAndOscillatory) {
  QuadratureConfig cfg;
  OscillationLayout none;
  const Estimate e = integrate([](double x) { return std::exp(x); }, 0.0, 1.0, none, cfg);
  EXPECT_NEAR(e.value, std::numbers::e - 1.0, 1e-13);
  EXPECT_FALSE(e.budget_exceeded);

  // int_0^1 cos(w x) dx = sin(w) / w at w = 8^6
  const double w = std::ldexp(1.0, 18);
  OscillationLayout lay;
  lay.add_zone(0.0, 1.0, w);
  const Estimate o = integrate([w](double x) { return std::cos(w * x); }, 0.0, 1.0, lay, cfg);
  EXPECT_NEAR(o.value, std::sin(w) / w, 1e-12);
  // mean of |cos| is 2/pi up to a partial period, O(1/w)
  EXPECT_NEAR(o.l1, 2.0 / std::numbers::pi, 4.0 / w);
}

TEST(Integrate, BudgetExceededIsReported) {
  QuadratureConfig cfg;
  cfg.max_evals = 100;
  OscillationLayout lay;
  lay.add_zone(0.0, 1.0, 1e6);
  const Estimate e = integrate([](double x) { return std::cos(1e6 * x * x); }, 0.0, 1.0, lay, cfg);
  EXPECT_TRUE(e.budget_exceeded);
  EXPECT_THROW(e.value_or_throw("test"), BudgetExceeded);
}

TEST(Integrate, ErrorEstimatesAreHonest) {
  // doubling the order moves the value by less than the reported error on >= 95% of cases
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  QuadratureConfig lo;
  lo.target_rel_tol = 1e-6;
  QuadratureConfig hi = lo;
  hi.gauss_order = 2 * lo.gauss_order;
  hi.target_rel_tol = 1e-11;
  int good = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const double w = std::pow(10.0, 1.0 + 4.0 * U(rng));
    const double c = U(rng);
    auto f = [=](double x) { return std::cos(w * x * x + c) * std::exp(-x); };
    OscillationLayout lay;
    lay.add_zone(0.0, 1.0, 2.0 * w);
    const Estimate a = integrate(f, 0.0, 1.0, lay, lo);
    const Estimate b = integrate(f, 0.0, 1.0, lay, hi);
    if (std::abs(a.value - b.value) <= a.error) ++good;
  }
  EXPECT_GE(good, 95 * n / 100);
}

TEST(CumulativeIntegral, MatchesDirectIntegration) {
  QuadratureConfig cfg;
  const double w = 4096.0;
  auto f = [w](double x) { return std::cos(w * x) * (1.0 + x); };
  OscillationLayout lay;
  lay.add_zone(0.0, 1.0, w);
  const CumulativeIntegral ci(f, 0.0, 1.0, lay, cfg);
  auto exact = [w](double x) {
    // int_x^1 (1 + t) cos(w t) dt
    auto F = [w](double t) { return (1.0 + t) * std::sin(w * t) / w + std::cos(w * t) / (w * w); };
    return F(1.0) - F(x);
  };
  for (double x : {-0.5, 0.0, 0.123, 0.5, 0.77777, 0.999, 1.0, 2.0}) {
    EXPECT_NEAR(ci.from(f, x), x >= 1.0 ? 0.0 : exact(std::max(x, 0.0)), 1e-12) << x;
  }
}

TEST(QuadratureConfig, Validation) {
  QuadratureConfig c;
  EXPECT_NO_THROW(c.validate());
  c.gauss_order = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.target_rel_tol = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
