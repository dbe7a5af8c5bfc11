#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wradon/radon.hpp"
#include "wradon/w0.hpp"

using namespace wradon;

namespace {

ModelPtr model8() {
  static const ModelPtr m = make_model(RadialProfile(default_phi(), 8), QuadratureConfig{});
  return m;
}

}  // namespace

TEST(DyadicPartition, Examples) {
  const DyadicPartition psi;
  EXPECT_NEAR(psi.sum(0.75), 1.0, 1e-15);
  EXPECT_EQ(psi.psi(3, 1.0 - std::ldexp(1.0, -2)), 0.0);
  EXPECT_EQ(psi.psi(3, 1.0 - std::ldexp(1.0, -5)), 0.0);
  // tau = 3: psi_2 and psi_3 carry everything
  const double s = 1.0 - std::ldexp(1.0, -3);
  double others = 0.0;
  for (int k = 1; k <= 60; ++k) {
    if (k != 2 && k != 3) others += std::abs(psi.psi(k, s));
  }
  EXPECT_EQ(others, 0.0);
  EXPECT_NEAR(psi.psi(2, s) + psi.psi(3, s), 1.0, 1e-15);
}

TEST(DyadicPartition, SumsToOneOnDenseGrid) {
  const DyadicPartition psi;
  for (int i = 0; i < 10000; ++i) {
    const double s = 0.5 + 1e-6 + (0.5 - 2e-6) * i / 9999.0;
    ASSERT_NEAR(psi.sum(s), 1.0, 1e-12) << s;
    ASSERT_NEAR(psi.sum(-s), 1.0, 1e-12) << s;
  }
}

TEST(GProfile, VanishesOutsideAndMatchesPlaneOracle) {
  const auto m = model8();
  EXPECT_EQ(m->G(1.0), 0.0);
  EXPECT_EQ(m->G(-1.3), 0.0);
  const auto& prof = m->profile();
  RadialHints h;
  h.profile = &prof;
  auto F = [&](const PlanePoint& pt) {
    double r2 = 0.0;
    for (double x : pt.x) r2 += x * x;
    return prof.f(RadialPoint::from_square(r2));
  };
  const PlaneSpecD pl = PlaneSpecD::from_plane3(PlaneSpec3(0.9, {0.0, 0.6, 0.8}));
  EXPECT_NEAR(integrate_plane_2d(F, pl, m->quad(), h).value, m->G(0.9), 1e-6 * std::abs(m->G(0.9)));
  // G is the unit-weight transform
  for (double s : {0.0, 0.3, 0.7, 0.95}) EXPECT_NEAR(rwf_reduced(*m, s).value, m->G(s), 1e-9 * (1e-3 + std::abs(m->G(s))));
}

TEST(GProfile, TailBound) {
  const auto m = model8();
  for (int mm = 3; mm <= 8; ++mm) {
    const double bound = g_bound(m->profile(), mm);
    EXPECT_NEAR(bound, 4.0 * std::numbers::pi / 3.0 * 20.0 * std::ldexp(1.0, -2 * mm) / factorial(mm), 1e-12 * bound);
    const double lo = 1.0 - std::ldexp(1.0, -mm);
    for (int i = 0; i <= 2000; ++i) EXPECT_LE(std::abs(m->G(lo + (1.2 - lo) * i / 2000)), bound);
  }
}

TEST(HProfile, LowerBounds) {
  const auto m = model8();
  const auto& prof = m->profile();
  for (int k = 3; k <= 8; ++k) {
    const double lb = h_k_lower_bound(prof, k);
    EXPECT_NEAR(lb, std::numbers::pi / 40.0 * std::ldexp(1.0, -k) - 0.5 * std::numbers::pi * 20.0 * std::ldexp(1.0, -2 * k),
                1e-12);
    const double hi = 1.0 - std::ldexp(1.0, 1 - k);
    for (int i = 1; i <= 500; ++i) {
      const double s = 0.5 + (hi - 0.5) * i / 500;
      const HParts h = m->shell_h(k, s);
      EXPECT_GE(h.total(), lb);
      EXPECT_GE(h.h1, std::numbers::pi / 40.0 * std::ldexp(1.0, -k));
    }
  }
}

TEST(HProfile, MatchesPlaneOracle) {
  const auto m = model8();
  const auto& prof = m->profile();
  RadialHints h;
  h.profile = &prof;
  auto F = [&](const PlanePoint& pt) {
    double r2 = 0.0;
    for (double x : pt.x) r2 += x * x;
    const double v = prof.f_k(4, RadialPoint::from_square(r2));
    return v * v;
  };
  const PlaneSpecD pl = PlaneSpecD::from_plane3(PlaneSpec3(0.9, {1.0, 0.0, 0.0}));
  const double ref = m->shell_h(4, 0.9).total();
  EXPECT_NEAR(integrate_plane_2d(F, pl, m->quad(), h).value, ref, 1e-6 * ref);
}

TEST(ShellConstants, FromPhi) {
  const auto c = shell_constants(RadialProfile{});
  EXPECT_NEAR(c.phi_derivative_max, 20.0, 1e-10);
  EXPECT_NEAR(c.c1, 80.0 * std::numbers::pi / 3.0, 1e-9);
  // pi/40 > 10 pi 2^-k first at k = 9
  EXPECT_EQ(c.k1, 9);
  EXPECT_NEAR(c.C2, std::numbers::pi / 40.0 - 10.0 * std::numbers::pi / 512.0, 1e-12);
  EXPECT_GT(c.C2, 0.0);
  EXPECT_NEAR(c.C, 4096.0 * c.c1 * c.c1 / c.C2, 1e-6 * c.C);
}

TEST(W0, TrivialValues) {
  const W0Profile w0(model8());
  for (double r : {1.05, 1.1, 2.0}) EXPECT_EQ(w0.eval(r, 1.05), 1.0);
  // r = 0.978 sits in the gap between shells 5 (ends at 0.975) and 6 (starts at 0.98125)
  ASSERT_FALSE(w0.model().profile().shell_of_radius(0.978));
  EXPECT_EQ(w0.eval(0.978, 0.9), 1.0);
  EXPECT_THROW(w0.eval(0.8, 0.4), DomainError);
  EXPECT_THROW(w0.eval(0.7, 0.8), DomainError);
  EXPECT_EQ(w0.eval(0.9, -0.8), w0.eval(0.9, 0.8));
}

TEST(W0, TelescopingZero) {
  const W0Profile w0(model8());
  const double scale = 1.0;  // |f| <= 1
  for (int i = 1; i <= 30; ++i) {
    const double s = 0.5 + 0.7 * i / 30.0;
    const double R = rwf_reduced(w0, s).value;
    EXPECT_LE(std::abs(R - w0.telescoped_transform(s)), 1e-6 * scale) << s;
  }
  EXPECT_NEAR(rwf_reduced(w0, 0.75).value, 0.0, 1e-6 * scale);
}

TEST(W0, TelescopingHoldsAtAnyTruncation) {
  for (int K : {2, 3, 5}) {
    const W0Profile w0(make_model(RadialProfile(default_phi(), K), QuadratureConfig{}));
    for (int i = 1; i <= 20; ++i) {
      const double s = 0.5 + 0.7 * i / 20.0;
      EXPECT_LE(std::abs(rwf_reduced(w0, s).value - w0.telescoped_transform(s)), 1e-9) << K << " " << s;
    }
  }
}

TEST(W0, TamperedWeightDoesNotVanish) {
  const W0Profile bad(model8(), 1);
  double worst = 0.0;
  for (int i = 1; i <= 50; ++i) worst = std::max(worst, std::abs(rwf_reduced(bad, 0.5 + 0.7 * i / 50).value));
  EXPECT_GT(worst, 1e-3);
}

TEST(W0, DecayOnDyadicWindows) {
  const W0Profile w0(model8());
  const auto c = shell_constants(w0.model().profile());
  double prev = INFINITY;
  for (int k = 5; k <= 8; ++k) {
    const double dev = window_deviation(w0, k, 4000);
    EXPECT_LE(dev, c.C * std::ldexp(1.0, -k) * std::pow(k, 4)) << k;
    if (k >= 7) { EXPECT_LT(dev, prev) << k; }
    prev = dev;
  }
}

TEST(Delta0, CertifiedAndRechecked) {
  const W0Profile w0(model8());
  const auto d = find_delta0(w0);
  EXPECT_GT(d.delta0, 0.5);
  EXPECT_LT(d.delta0, 1.0);
  EXPECT_LE(d.worst_bound, 0.5);
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double s = d.delta0 + 1e-3 + (1.0 - d.delta0 - 1e-3) * U(rng);
    const double r = s + (1.0 - s) * U(rng);
    ASSERT_GE(w0.eval(r, s), 0.5) << r << " " << s;
  }
}

// one truncation step costs 64x the previous; 8 -> 10 is the largest pair that fits a test
TEST(Delta0, MonotoneInTruncation) {
  const W0Profile a(model8());
  const W0Profile b(make_model(RadialProfile(default_phi(), 10), QuadratureConfig{}));
  const Delta0Options opt;
  EXPECT_GE(find_delta0(a, opt).delta0, find_delta0(b, opt).delta0 - opt.h_max);
}
