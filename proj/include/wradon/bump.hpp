#pragma once

// Smooth transition functions.
//
// Every cutoff in the library (the radial profile Phi, the dyadic partition,
// the in-plane bumps of local weights and the cover partition) is built from
// one C-infinity step
//
//   sigma(x) = h(x) / (h(x) + h(1 - x)),   h(x) = exp(-1/x) for x > 0, else 0,
//
// which is 0 for x <= 0, 1 for x >= 1 and satisfies sigma(x) + sigma(1-x) = 1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wradon {

/// C-infinity step from 0 (x <= 0) to 1 (x >= 1).
inline double smooth_step(double x) noexcept {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // sigma = 1 / (1 + exp(1/x - 1/(1-x)))
  const double q = 1.0 / x - 1.0 / (1.0 - x);
  if (q > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(q));
}

/// Derivative of smooth_step.
inline double smooth_step_derivative(double x) noexcept {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double q = 1.0 / x - 1.0 / (1.0 - x);
  if (std::abs(q) > 700.0) return 0.0;
  const double e = std::exp(q);
  const double s = 1.0 / (1.0 + e);
  const double dq = 1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x));
  // d sigma/dx = sigma (1 - sigma) dq, with 1 - sigma = e sigma
  return s * s * e * dq;
}

/// Maximum of smooth_step_derivative on (0, 1), by dense scan plus golden-section polish.
inline double smooth_step_derivative_max() {
  static const double cached = [] {
    constexpr int n = 4096;
    int best = 1;
    double best_val = 0.0;
    for (int i = 1; i < n; ++i) {
      const double v = smooth_step_derivative(static_cast<double>(i) / n);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    double a = static_cast<double>(best - 1) / n;
    double b = static_cast<double>(best + 1) / n;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = smooth_step_derivative(c);
    double fd = smooth_step_derivative(d);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = smooth_step_derivative(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = smooth_step_derivative(d);
      }
    }
    return std::max({best_val, fc, fd});
  }();
  return cached;
}

/// Piecewise-smooth bump: 0 outside [rise_start, fall_end], 1 on
/// [rise_end, fall_start], smooth_step transitions in between.
struct BumpSpec {
  double rise_start = 0.0;
  double rise_end = 0.0;
  double fall_start = 0.0;
  double fall_end = 0.0;

  BumpSpec() = default;
  BumpSpec(double a, double b, double c, double d) : rise_start(a), rise_end(b), fall_start(c), fall_end(d) {
    validate();
  }

  void validate() const {
    if (!(std::isfinite(rise_start) && std::isfinite(rise_end) && std::isfinite(fall_start) &&
          std::isfinite(fall_end))) {
      throw std::invalid_argument("BumpSpec: non-finite abscissa");
    }
    if (!(rise_start < rise_end && rise_end <= fall_start && fall_start < fall_end)) {
      throw std::invalid_argument("BumpSpec: need rise_start < rise_end <= fall_start < fall_end");
    }
  }

  double operator()(double t) const noexcept {
    if (t <= rise_start || t >= fall_end) return 0.0;
    if (t < rise_end) return smooth_step((t - rise_start) / (rise_end - rise_start));
    if (t <= fall_start) return 1.0;
    return smooth_step((fall_end - t) / (fall_end - fall_start));
  }

  double derivative(double t) const noexcept {
    if (t <= rise_start || t >= fall_end) return 0.0;
    if (t < rise_end) {
      const double w = rise_end - rise_start;
      return smooth_step_derivative((t - rise_start) / w) / w;
    }
    if (t <= fall_start) return 0.0;
    const double w = fall_end - fall_start;
    return -smooth_step_derivative((fall_end - t) / w) / w;
  }

  /// max_t |bump'(t)|; the steeper of the two transitions decides.
  double derivative_max() const {
    const double w = std::min(rise_end - rise_start, fall_end - fall_start);
    return smooth_step_derivative_max() / w;
  }

  bool in_open_support(double t) const noexcept { return t > rise_start && t < fall_end; }
  bool on_plateau(double t) const noexcept { return t >= rise_end && t <= fall_start; }

  friend bool operator==(const BumpSpec&, const BumpSpec&) = default;
};

/// The radial cutoff: support [4/5, 6/5], plateau [9/10, 11/10].
inline BumpSpec default_phi() { return BumpSpec(0.8, 0.9, 1.1, 1.2); }

}  // namespace wradon
