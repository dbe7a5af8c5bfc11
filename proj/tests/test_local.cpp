#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "wradon/local.hpp"
#include "wradon/radon.hpp"
#include "wradon/serialize.hpp"

using namespace wradon;

namespace {

constexpr int kSmall = 5;

struct Fixture {
  ModelPtr model;
  std::shared_ptr<const W0Profile> w0;
  double delta0;
  std::shared_ptr<const AssembledWeight> weight;
};

const Fixture& small() {
  static const Fixture fx = [] {
    Fixture f;
    f.model = make_model(RadialProfile(default_phi(), kSmall), QuadratureConfig{});
    f.w0 = std::make_shared<const W0Profile>(f.model);
    f.delta0 = find_delta0(*f.w0).delta0;
    f.weight = std::make_shared<const AssembledWeight>(f.w0, build_cover(*f.model, f.delta0));
    return f;
  }();
  return fx;
}

}  // namespace

TEST(BumpLevelSet, HalfLevelOfPhi) {
  const auto [a, b] = bump_level_set(default_phi(), 0.5);
  EXPECT_NEAR(a, 0.85, 1e-14);
  EXPECT_NEAR(b, 1.15, 1e-14);
  // the step is flat to all digits near its top, so level 1 is reached a little early
  const auto [c, d] = bump_level_set(default_phi(), 1.0);
  EXPECT_EQ(default_phi()(c), 1.0);
  EXPECT_EQ(default_phi()(d), 1.0);
  EXPECT_LE(c, 0.9);
  EXPECT_GE(d, 1.1);
  EXPECT_GT(c, 0.89);
  EXPECT_LT(d, 1.11);
}

TEST(Lobes, ConstantSignOfF) {
  RadialProfile prof(default_phi(), kSmall);
  const auto lobes = lobes_above(prof, 0.3, 50);
  ASSERT_FALSE(lobes.empty());
  for (const auto& l : lobes) {
    ASSERT_LT(l.v_lo, l.v_hi);
    EXPECT_GE(prof.bump(std::ldexp(1.0 - l.r_star, l.k)), 0.5 - 1e-12);
    for (int i = 1; i < 50; ++i) {
      const double v = l.v_lo + (l.v_hi - l.v_lo) * i / 50.0;
      const double fv = prof.f(RadialPoint::from_square(v));
      if (fv != 0.0) { EXPECT_EQ(fv > 0.0 ? 1 : -1, l.sign) << l.k << " " << v; }
    }
  }
  for (std::size_t i = 1; i < lobes.size(); ++i) EXPECT_LE(lobes[i - 1].k, lobes[i].k);
}

TEST(LocalWeight, PositiveAndAtLeastOneAtCentre) {
  const auto& fx = small();
  const Model& m = *fx.model;
  for (double s0 : {0.0, 0.31, 0.6, 0.85}) {
    if (s0 > fx.delta0) continue;
    const LocalWeight w = build_local_weight(m, s0, fx.delta0);
    ASSERT_GT(w.eps, 0.0);
    const double lo = w.window_lo();
    const double hi = w.window_hi();
    for (int i = 0; i < 200; ++i) {
      const double s = lo + (hi - lo) * (i + 0.5) / 200.0;
      const LocalSlice sl = local_slice(m, w, s);
      for (int j = 0; j < 200; ++j) {
        const double rho = 1.1 * j / 199.0;
        ASSERT_GE(sl(RadialPoint::from_square(s * s + rho * rho)), 0.5) << s0 << " " << s << " " << rho;
      }
    }
    const LocalSlice c = local_slice(m, w, s0);
    const double slack = w.m0_vanishes ? 1e-6 : 0.0;
    for (int j = 0; j < 200; ++j) {
      const double rho = 1.1 * j / 199.0;
      EXPECT_GE(c(RadialPoint::from_square(s0 * s0 + rho * rho)), 1.0 - slack);
    }
  }
}

TEST(LocalWeight, TransformVanishesOnWindow) {
  const auto& fx = small();
  const Model& m = *fx.model;
  const LocalWeight w = build_local_weight(m, 0.42, fx.delta0);
  for (int i = 0; i < 9; ++i) {
    const double s = w.s0 + w.eps * (-0.9 + 1.8 * i / 8.0);
    EXPECT_LE(std::abs(rwf_reduced(m, w, s).value), 1e-6) << s;
  }
}

TEST(LocalWeight, RejectsCentreOutsideRange) {
  const auto& fx = small();
  EXPECT_THROW(build_local_weight(*fx.model, fx.delta0 + 0.01, fx.delta0), DomainError);
  EXPECT_THROW(build_local_weight(*fx.model, -0.1, fx.delta0), DomainError);
}

TEST(Cover, PartitionOfUnityAndCoverage) {
  const auto& fx = small();
  const CoverPartition& cov = fx.weight->cover();
  for (int i = 0; i < 10000; ++i) {
    const double s = -1.5 + 3.0 * i / 9999.0;
    ASSERT_NEAR(cov.xi_sum(s), 1.0, 1e-12) << s;
  }
  const auto at = cov.active(1.2);
  ASSERT_EQ(at.size(), 1u);
  EXPECT_EQ(at[0].index, -1);
  EXPECT_EQ(at[0].xi, 1.0);
  EXPECT_EQ(cov.xi(0, 1.2), 0.0);
  // every |s| <= delta0 lies inside some window
  for (int i = 0; i <= 20000; ++i) {
    const double s = fx.delta0 * i / 20000.0;
    bool inside = false;
    for (const auto& w : cov.locals()) {
      if (std::abs(s - w.s0) < w.eps) {
        inside = true;
        break;
      }
    }
    ASSERT_TRUE(inside) << s;
  }
}

TEST(Cover, TooLargeIsReported) {
  const auto& fx = small();
  CoverOptions opt;
  opt.n_max = 3;
  EXPECT_THROW(build_cover(*fx.model, fx.delta0, opt), CoverTooLarge);
}

TEST(Assembled, TrivialValuesSymmetryAndCounters) {
  const auto& fx = small();
  const AssembledWeight& W = *fx.weight;
  for (double r : {1.05, 1.2}) EXPECT_EQ(W.eval(r, 1.05), 1.0);
  EXPECT_EQ(W.eval(1.3, 1.2), fx.w0->eval(1.3, 1.2));
  EXPECT_THROW(W.eval(0.3, 0.5), DomainError);
  const auto before = W.counters().outside_support.load();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double wmin = INFINITY;
  for (int i = 0; i < 3000; ++i) {
    const double s = 1.2 * U(rng);
    const double r = s + (1.25 - s) * U(rng);
    const double v = W.eval(r, s);
    EXPECT_EQ(v, W.eval(r, -s));
    wmin = std::min(wmin, v);
  }
  EXPECT_GE(wmin, 0.5 - 1e-9);
  EXPECT_EQ(W.counters().outside_support.load(), before);
}

TEST(Profile, RoundTripIsExact) {
  const auto& fx = small();
  const auto path = std::filesystem::temp_directory_path() / "wradon-test-profile.json";
  save_profile(*fx.weight, path.string());
  const AssembledWeight back = load_profile(path.string());
  EXPECT_EQ(profile_to_json(back), profile_to_json(*fx.weight));
  for (double s : {0.0, 0.2, 0.77, 0.95}) {
    for (double r : {s, 0.5 * (s + 1.0), 1.0}) {
      if (r < s) continue;
      EXPECT_EQ(back.eval(r, s), fx.weight->eval(r, s)) << r << " " << s;
    }
  }
  std::filesystem::remove(path);
}

TEST(Profile, MalformedInputThrowsFormatError) {
  const auto& fx = small();
  auto j = profile_to_json(*fx.weight);
  auto bad_version = j;
  bad_version["version"] = 99;
  EXPECT_THROW(profile_from_json(bad_version), FormatError);
  auto missing = j;
  missing.erase("delta0");
  EXPECT_THROW(profile_from_json(missing), FormatError);
  auto bad_local = j;
  bad_local["locals"][0]["eps"] = -1.0;
  EXPECT_THROW(profile_from_json(bad_local), FormatError);
  auto bad_bump = j;
  bad_bump["bump"]["rise_end"] = 0.1;
  EXPECT_THROW(profile_from_json(bad_bump), FormatError);
  EXPECT_THROW(load_profile("/nonexistent/wradon.json"), FormatError);
}
