#pragma once

// Sign changes of g_k(t) = cos(8^k |x0 + t omega|^2) on the part of the line
// x0 + t omega (omega unit, orthogonal to x0, t >= 0) that crosses shell k.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numbers>

#include "wradon/errors.hpp"
#include "wradon/radial.hpp"

namespace wradon {

struct SignChangeEvidence {
  int k = 0;
  double t0 = 0.0;  ///< entry into the shell (inner radius)
  double t1 = 0.0;  ///< exit (outer radius)
  double step = 0.0;
  double t_pos = std::numeric_limits<double>::quiet_NaN();
  double t_neg = std::numeric_limits<double>::quiet_NaN();
  std::int64_t samples = 0;
  double variation = 0.0;  ///< phi(t1) - phi(t0)
  bool found = false;
  bool length_ok = false;   ///< t1 - t0 >= (2/5) 2^-k
  bool trigger_ok = false;  ///< 8^k variation >= 2 pi
};

inline double line_length_floor(int k) { return 0.4 * pow2(-k); }

/// Smallest admissible shell index for a line through x0.
inline int line_shell_index(double x0_norm) {
  return std::max(3, static_cast<int>(std::ceil(std::log2(6.0 / (5.0 * (1.0 - x0_norm))))));
}

inline SignChangeEvidence check_sign_change(const std::array<double, 3>& x0, const std::array<double, 3>& omega, int k,
                                            const RadialProfile& profile = {}) {
  const double on = omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2];
  const double x2 = x0[0] * x0[0] + x0[1] * x0[1] + x0[2] * x0[2];
  const double xo = x0[0] * omega[0] + x0[1] * omega[1] + x0[2] * omega[2];
  if (k < 1) throw DomainError("check_sign_change: k >= 1");
  if (!(std::abs(on - 1.0) <= 1e-12)) throw DomainError("check_sign_change: omega must be a unit vector");
  if (!(std::abs(xo) <= 1e-12 * std::max(1.0, std::sqrt(x2)))) throw DomainError("check_sign_change: x0 . omega != 0");
  const double r_in = profile.shell_inner(k);
  const double r_out = profile.shell_outer(k);
  if (std::sqrt(x2) >= r_in) throw NoIntersection("check_sign_change: line misses the inner radius of the shell");

  SignChangeEvidence ev;
  ev.k = k;
  ev.t0 = std::sqrt(r_in * r_in - x2);
  ev.t1 = std::sqrt(r_out * r_out - x2);
  ev.variation = r_out * r_out - r_in * r_in;
  const double rate = pow8(k);
  ev.step = std::numbers::pi / (rate * 2.0 * 2.0 * ev.t1);
  // a few ulps: at x0 = 0 the length equals the floor exactly
  const double slack = 8.0 * std::numeric_limits<double>::epsilon();
  ev.length_ok = ev.t1 - ev.t0 >= line_length_floor(k) * (1.0 - slack);
  ev.trigger_ok = rate * ev.variation >= 2.0 * std::numbers::pi;

  const auto n = static_cast<std::int64_t>(std::ceil((ev.t1 - ev.t0) / ev.step));
  for (std::int64_t i = 0; i <= n; ++i) {
    const double t = std::min(ev.t1, ev.t0 + static_cast<double>(i) * ev.step);
    const double g = std::cos(rate * (x2 + t * t));
    ++ev.samples;
    if (g > 0.0 && std::isnan(ev.t_pos)) ev.t_pos = t;
    if (g < 0.0 && std::isnan(ev.t_neg)) ev.t_neg = t;
    if (!std::isnan(ev.t_pos) && !std::isnan(ev.t_neg)) break;
  }
  ev.found = !std::isnan(ev.t_pos) && !std::isnan(ev.t_neg);
  return ev;
}

}  // namespace wradon
