#pragma once

// The spherically symmetric test function
//
//   f(x) = sum_k f_k(|x|) / k!,   f_k(r) = Phi(2^k (1 - r)) cos(8^k r^2),
//
// together with the geometry of the shells D_k on which the f_k live.
// Evaluation is exact by construction: at any radius at most one shell is
// active, so f is a single term, never a truncated numerical sum.

#include <array>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wradon/bump.hpp"

namespace wradon {

/// Index k >= 1 of a shell D_k.
class ShellIndex {
 public:
  explicit ShellIndex(int k) : k_(k) {
    if (k < 1) throw std::invalid_argument("ShellIndex: k must be >= 1");
  }
  int value() const noexcept { return k_; }
  friend bool operator==(ShellIndex, ShellIndex) = default;
  friend auto operator<=>(ShellIndex, ShellIndex) = default;

 private:
  int k_;
};

/// A radius given together with its square. Integrals are carried out in the
/// squared radius so that the phase 8^k r^2 is formed without rounding.
struct RadialPoint {
  double r;
  double r2;

  static RadialPoint from_radius(double r) { return {r, r * r}; }
  static RadialPoint from_square(double r2) { return {std::sqrt(r2), r2}; }
};

inline double pow2(int k) { return std::ldexp(1.0, k); }
inline double pow8(int k) { return std::ldexp(1.0, 3 * k); }

inline double inverse_factorial(int k) {
  double v = 1.0;
  for (int i = 2; i <= k; ++i) v /= i;
  return v;
}

inline double factorial(int k) {
  double v = 1.0;
  for (int i = 2; i <= k; ++i) v *= i;
  return v;
}

struct RadialProfile {
  BumpSpec bump = default_phi();
  int k_max = 10;

  RadialProfile() = default;
  RadialProfile(BumpSpec b, int kmax) : bump(b), k_max(kmax) { validate(); }

  void validate() const {
    bump.validate();
    if (k_max < 1 || k_max > 60) throw std::invalid_argument("RadialProfile: k_max must be in [1, 60]");
    if (!(bump.rise_start > 0.0)) throw std::invalid_argument("RadialProfile: bump support must be positive");
    // disjoint shells need fall_end / rise_start < 2
    if (!(bump.fall_end < 2.0 * bump.rise_start)) {
      throw std::invalid_argument("RadialProfile: bump support too wide for disjoint shells");
    }
    if (!(bump.fall_end < 2.0)) throw std::invalid_argument("RadialProfile: shell 1 must lie inside the unit ball");
  }

  double phi(double t) const noexcept { return bump(t); }

  /// Radii 1 - t 2^-k for the four bump abscissae, increasing.
  std::array<double, 4> shell_breaks(int k) const {
    const double h = pow2(-k);
    return {1.0 - bump.fall_end * h, 1.0 - bump.fall_start * h, 1.0 - bump.rise_end * h, 1.0 - bump.rise_start * h};
  }

  double shell_inner(int k) const { return 1.0 - bump.fall_end * pow2(-k); }
  double shell_outer(int k) const { return 1.0 - bump.rise_start * pow2(-k); }
  double plateau_inner(int k) const { return 1.0 - bump.fall_start * pow2(-k); }
  double plateau_outer(int k) const { return 1.0 - bump.rise_end * pow2(-k); }

  /// The unique k (any k >= 1, not limited by k_max) with r in the open shell D_k.
  std::optional<ShellIndex> shell_of_radius(double r) const {
    if (!(r > 0.0 && r < 1.0)) return std::nullopt;
    const double gap = 1.0 - r;
    // need rise_start < 2^k gap < fall_end
    const int k_hi = static_cast<int>(std::floor(std::log2(bump.fall_end / gap)));
    for (int k = std::max(1, k_hi - 1); k <= k_hi + 1; ++k) {
      const double t = std::ldexp(gap, k);
      if (t > bump.rise_start && t < bump.fall_end) return ShellIndex(k);
    }
    return std::nullopt;
  }

  double f_k(int k, RadialPoint p) const {
    const double t = std::ldexp(1.0 - p.r, k);
    const double a = bump(t);
    if (a == 0.0) return 0.0;
    return a * std::cos(pow8(k) * p.r2);
  }

  double f_k(ShellIndex k, double r) const { return f_k(k.value(), RadialPoint::from_radius(r)); }

  /// f at a radius; only shells k <= k_max contribute.
  double f(RadialPoint p) const {
    const auto k = shell_of_radius(p.r);
    if (!k || k->value() > k_max) return 0.0;
    return f_k(k->value(), p) * inverse_factorial(k->value());
  }

  double f(double r) const { return f(RadialPoint::from_radius(r)); }

  /// Innermost radius of the support of f.
  double support_inner() const { return shell_inner(1); }

  /// max_t |Phi'(t)|.
  double phi_derivative_max() const { return bump.derivative_max(); }

  /// max_r |f_k(r)| over the closed shell; 1 whenever the plateau holds a multiple of pi in phase.
  double shell_sup_abs(int k) const {
    const double w = pow8(k);
    const double lo = plateau_inner(k);
    const double hi = plateau_outer(k);
    const double n = std::ceil(w * lo * lo / std::numbers::pi);
    if (n * std::numbers::pi <= w * hi * hi) return 1.0;
    double best = 0.0;
    const double a = shell_inner(k);
    const double b = shell_outer(k);
    constexpr int samples = 20000;
    for (int i = 0; i <= samples; ++i) {
      const double r = a + (b - a) * i / samples;
      best = std::max(best, std::abs(f_k(k, RadialPoint::from_radius(r))));
    }
    return best;
  }
};

}  // namespace wradon
