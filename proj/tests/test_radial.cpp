#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wradon/radial.hpp"

using namespace wradon;

namespace {

// 4/5 < 2^k (1 - r) < 6/5, tried for every k
std::optional<int> brute_shell(double r) {
  for (int k = 1; k <= 60; ++k) {
    const double t = std::ldexp(1.0 - r, k);
    if (t > 0.8 && t < 1.2) return k;
  }
  return std::nullopt;
}

}  // namespace

TEST(ShellOfRadius, Examples) {
  const RadialProfile prof;
  ASSERT_TRUE(prof.shell_of_radius(0.875));
  EXPECT_EQ(prof.shell_of_radius(0.875)->value(), 3);
  // 2 (1 - 0.5) = 1 lies in (4/5, 6/5)
  ASSERT_TRUE(prof.shell_of_radius(0.5));
  EXPECT_EQ(prof.shell_of_radius(0.5)->value(), 1);
  EXPECT_FALSE(prof.shell_of_radius(0.35));
  // 2 (1 - 0.4) = 6/5 sits on the closed edge of shell 1
  EXPECT_FALSE(prof.shell_of_radius(0.4));
}

TEST(ShellOfRadius, AgreesWithBruteForce) {
  RadialProfile prof;
  prof.k_max = 60;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double r = U(rng);
    if (r <= 0.0) continue;
    const auto a = prof.shell_of_radius(r);
    const auto b = brute_shell(r);
    ASSERT_EQ(a.has_value(), b.has_value()) << r;
    if (a) { EXPECT_EQ(a->value(), *b) << r; }
  }
}

TEST(ShellIndex, RejectsNonPositive) {
  EXPECT_THROW(ShellIndex(0), std::invalid_argument);
  EXPECT_NO_THROW(ShellIndex(1));
}

TEST(FK, Examples) {
  const RadialProfile prof;
  EXPECT_EQ(prof.f_k(ShellIndex(3), 0.875), std::cos(392.0));
  EXPECT_EQ(prof.f_k(ShellIndex(3), 0.84), 0.0);
  EXPECT_EQ(prof.f(1.0), 0.0);
  EXPECT_EQ(prof.f(1.3), 0.0);
  EXPECT_DOUBLE_EQ(prof.f(0.875), prof.f_k(ShellIndex(3), 0.875) / 6.0);
}

TEST(FK, BoundedByOne) {
  const RadialProfile prof;
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> K(1, 10);
  std::uniform_real_distribution<double> U(0.0, 1.1);
  for (int i = 0; i < 100000; ++i) EXPECT_LE(std::abs(prof.f_k(ShellIndex(K(rng)), U(rng))), 1.0);
}

TEST(FK, DisjointSupports) {
  const RadialProfile prof;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.3, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double r = U(rng);
    for (int k = 1; k <= prof.k_max; ++k) {
      for (int j = k + 1; j <= prof.k_max; ++j) {
        ASSERT_EQ(prof.f_k(ShellIndex(k), r) * prof.f_k(ShellIndex(j), r), 0.0) << r << " " << k << " " << j;
      }
    }
  }
}

TEST(F, PerShellDecomposition) {
  const RadialProfile prof;
  const int n = 1000000;
  double whole = 0.0;
  std::vector<double> shells(prof.k_max + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const double r = 1.1 * (i + 0.5) / n;
    whole += std::abs(prof.f(r));
    for (int k = 1; k <= prof.k_max; ++k) shells[k] += std::abs(prof.f_k(ShellIndex(k), r)) * inverse_factorial(k);
  }
  double sum = 0.0;
  for (double s : shells) sum += s;
  EXPECT_NEAR(whole, sum, 1e-9 * sum);
}

TEST(F, ShellGeometry) {
  const RadialProfile prof;
  for (int k = 1; k <= 10; ++k) {
    EXPECT_DOUBLE_EQ(prof.shell_inner(k), 1.0 - 1.2 * std::ldexp(1.0, -k));
    EXPECT_DOUBLE_EQ(prof.shell_outer(k), 1.0 - 0.8 * std::ldexp(1.0, -k));
    const auto br = prof.shell_breaks(k);
    for (int i = 0; i < 3; ++i) EXPECT_LT(br[i], br[i + 1]);
    if (k > 1) { EXPECT_GE(prof.shell_inner(k), prof.shell_outer(k - 1)); }
  }
  EXPECT_EQ(factorial(5), 120.0);
  EXPECT_DOUBLE_EQ(inverse_factorial(4), 1.0 / 24.0);
}
