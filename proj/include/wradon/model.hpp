#pragma once

// Shared, immutable description of f together with the per-shell plane
// integrals every weight needs:
//
//   G_k(s)    = pi     int_{max(s^2, a_k^2)}^{b_k^2} Phi(2^k(1 - sqrt v)) cos(8^k v) dv
//   H_k,1(s)  = pi / 2 int ...                     Phi^2(2^k(1 - sqrt v)) dv
//   H_k,2(s)  = pi / 2 int ...                     Phi^2(2^k(1 - sqrt v)) cos(2 8^k v) dv
//
// with (a_k, b_k) the radial extent of shell k. Each is computed once over the
// whole shell and kept as a cumulative integral, so evaluating at an offset s
// re-integrates at most one panel.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "wradon/plane.hpp"
#include "wradon/quadrature.hpp"
#include "wradon/radial.hpp"

namespace wradon {

/// Integrand of one shell integral in the squared radius.
struct ShellIntegrand {
  enum class Kind { linear, square, square_cos };

  const BumpSpec* bump;
  int k;
  Kind kind;

  double operator()(double v) const {
    const double t = std::ldexp(1.0 - std::sqrt(v), k);
    const double a = (*bump)(t);
    if (a == 0.0) return 0.0;
    const double w = pow8(k) * v;
    switch (kind) {
      case Kind::linear:
        return a * std::cos(w);
      case Kind::square:
        return a * a;
      case Kind::square_cos:
        return a * a * std::cos(2.0 * w);
    }
    return 0.0;
  }
};

/// Split of H_k into its non-oscillatory and oscillatory halves.
struct HParts {
  double h1 = 0.0;
  double h2 = 0.0;
  double total() const { return h1 + h2; }
};

class Model {
 public:
  Model(RadialProfile profile, QuadratureConfig cfg) : profile_(profile), cfg_(cfg) {
    profile_.validate();
    cfg_.validate();
    const int K = profile_.k_max;
    shells_.resize(K + 1);
    for (int k = 1; k <= K; ++k) build_shell(k);
  }
  // the shell integrands point into profile_
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const RadialProfile& profile() const { return profile_; }
  const QuadratureConfig& quad() const { return cfg_; }
  int k_max() const { return profile_.k_max; }

  double phi_derivative_max() const { return profile_.phi_derivative_max(); }
  double phi_max() const { return 1.0; }
  /// c1 = (4 pi / 3) max |Phi'|.
  double c1() const { return 4.0 * std::numbers::pi / 3.0 * phi_derivative_max(); }

  /// Layout of the shells in the squared radius.
  OscillationLayout layout(int harmonic = 2) const { return shell_layout(profile_, harmonic); }

  /// G_k(s): plane integral of f_k at offset s (0 once the plane misses the shell).
  double shell_g(int k, double s) const {
    if (k < 1 || k > k_max()) return 0.0;
    const auto& sh = shells_[k];
    return std::numbers::pi * sh.g.from(sh.g_f, s * s);
  }

  HParts shell_h(int k, double s) const {
    if (k < 1 || k > k_max()) return {};
    const auto& sh = shells_[k];
    const double v = s * s;
    return {0.5 * std::numbers::pi * sh.h1.from(sh.h1_f, v), 0.5 * std::numbers::pi * sh.h2.from(sh.h2_f, v)};
  }

  /// Whole-shell estimates, for reporting.
  Estimate shell_g_total(int k) const { return shells_.at(k).g.total().scaled(std::numbers::pi); }

  /// G(s) = sum_k G_k(s) / k!, over the shells the plane meets.
  double G(double s) const {
    const double as = std::abs(s);
    if (as >= 1.0) return 0.0;
    // inner shells first would lose the tiny outer contributions in rounding;
    // add from the outermost shell inwards
    double acc = 0.0;
    for (int k = k_max(); k >= 1; --k) {
      if (profile_.shell_outer(k) <= as) break;
      acc += shell_g(k, as) * inverse_factorial(k);
    }
    return acc;
  }

  /// Quadrature error estimate of G, summed over all shells.
  double G_error() const {
    double e = 0.0;
    for (int k = 1; k <= k_max(); ++k) e += std::numbers::pi * shells_[k].g.total().error * inverse_factorial(k);
    return e;
  }

  /// |G'(s)| = 2 pi |s| |f(s)|, bounded over [a, b] by the shells meeting it.
  double G_slope_bound(double a, double b) const {
    double f_sup = 0.0;
    for (int k = 1; k <= k_max(); ++k) {
      if (profile_.shell_inner(k) < b && profile_.shell_outer(k) > a) f_sup = std::max(f_sup, inverse_factorial(k));
    }
    return 2.0 * std::numbers::pi * std::abs(b) * f_sup;
  }

  /// Upper bound on the part of G dropped by truncating f at k_max.
  double g_tail_bound() const {
    const int K = k_max();
    return c1() * std::ldexp(1.0, -2 * (K + 1)) * inverse_factorial(K + 1) * (4.0 / 3.0);
  }

 private:
  struct Shell {
    ShellIntegrand g_f;
    ShellIntegrand h1_f;
    ShellIntegrand h2_f;
    CumulativeIntegral g;
    CumulativeIntegral h1;
    CumulativeIntegral h2;
  };

  void build_shell(int k) {
    auto& sh = shells_[k];
    sh.g_f = {&profile_.bump, k, ShellIntegrand::Kind::linear};
    sh.h1_f = {&profile_.bump, k, ShellIntegrand::Kind::square};
    sh.h2_f = {&profile_.bump, k, ShellIntegrand::Kind::square_cos};
    const auto br = profile_.shell_breaks(k);
    const double lo = br[0] * br[0];
    const double hi = br[3] * br[3];
    OscillationLayout l1;
    OscillationLayout l2;
    for (double r : br) {
      l1.add_break(r * r);
      l2.add_break(r * r);
    }
    l1.add_zone(lo, hi, pow8(k));
    l2.add_zone(lo, hi, 2.0 * pow8(k));
    sh.g = CumulativeIntegral(sh.g_f, lo, hi, l1, cfg_);
    sh.h1 = CumulativeIntegral(sh.h1_f, lo, hi, l1, cfg_);
    sh.h2 = CumulativeIntegral(sh.h2_f, lo, hi, l2, cfg_);
  }

  RadialProfile profile_;
  QuadratureConfig cfg_;
  std::vector<Shell> shells_;
};

using ModelPtr = std::shared_ptr<const Model>;

inline ModelPtr make_model(RadialProfile profile, QuadratureConfig cfg) {
  return std::make_shared<const Model>(profile, cfg);
}

}  // namespace wradon
