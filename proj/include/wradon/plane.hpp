#pragma once

// Integration over planes.
//
// For a radial integrand x -> g(|x|) the integral over the plane {x . theta = s}
// only depends on |s|:
//
//   int_{P_s} g(|x|) dx = 2 pi int_{|s|}^{1} g(r) r dr = pi int_{s^2}^{1} g(sqrt v) dv,
//
// (support of g inside the closed unit ball). The last form is the one used
// here: in the squared radius v the phase 8^k v of every shell advances at a
// constant, exactly known rate.
//
// Two independent routes are provided for cross-checking:
//  * the u-substitution form of the shell integrals (u = v / s^2),
//  * genuine 2-D quadrature on a plane in R^3 or R^d, evaluating the
//    integrand at points x = p + u1 e1 + u2 e2.

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "wradon/errors.hpp"
#include "wradon/quadrature.hpp"
#include "wradon/radial.hpp"

namespace wradon {

/// Breakpoints and phase rates of the shells 1..k_max in the squared radius.
/// harmonic = 1 for integrands linear in the f_k, 2 for quadratic ones.
inline OscillationLayout shell_layout(const RadialProfile& profile, int harmonic = 2) {
  OscillationLayout layout;
  for (int k = 1; k <= profile.k_max; ++k) {
    const auto br = profile.shell_breaks(k);
    for (double r : br) layout.add_break(r * r);
    layout.add_zone(br[0] * br[0], br[3] * br[3], harmonic * pow8(k));
  }
  return layout;
}

/// Plane integral of x -> g(|x|) over {x . theta = s}, for g supported in the unit ball.
/// g is called with a RadialPoint.
template <class G>
Estimate integrate_plane_radial(const G& g, double s, const QuadratureConfig& cfg, const OscillationLayout& layout) {
  const double a = s * s;
  if (!(a < 1.0)) return {};
  auto integrand = [&g](double v) { return g(RadialPoint::from_square(v)); };
  return integrate(integrand, a, 1.0, layout, cfg).scaled(std::numbers::pi);
}

template <class G>
Estimate integrate_plane_radial(const G& g, double s, const QuadratureConfig& cfg, const RadialProfile& profile) {
  return integrate_plane_radial(g, s, cfg, shell_layout(profile, 2));
}

// ---------------------------------------------------------------------------
// u-substitution route for the shell integrals

namespace detail {

struct UWindow {
  double lo = 0.0;
  double hi = 0.0;
  std::array<double, 4> breaks{};
};

// Lambda_{k,s} = {u >= 1 : 2^k (1 - s sqrt(u)) in supp Phi}
inline UWindow lambda_window(const RadialProfile& profile, int k, double s) {
  UWindow w;
  const double h = pow2(-k);
  const BumpSpec& b = profile.bump;
  const std::array<double, 4> ts{b.fall_end, b.fall_start, b.rise_end, b.rise_start};
  for (int i = 0; i < 4; ++i) {
    const double q = (1.0 - ts[i] * h) / s;
    w.breaks[i] = q * q;
  }
  w.lo = std::max(1.0, w.breaks[0]);
  w.hi = w.breaks[3];
  return w;
}

}  // namespace detail

/// G_k(s) = pi s^2 int_{Lambda_{k,|s|}} Phi(2^k (1 - |s| sqrt u)) cos(8^k s^2 u) du.
inline Estimate g_k_oscillatory(const RadialProfile& profile, int k, double s, const QuadratureConfig& cfg) {
  const double as = std::abs(s);
  if (as >= 1.0) return {};
  if (!(as > 0.0)) throw DomainError("g_k_oscillatory: u-substitution needs s != 0");
  const auto w = detail::lambda_window(profile, k, as);
  if (!(w.hi > w.lo)) return {};
  const double s2 = as * as;
  const double freq = pow8(k) * s2;
  OscillationLayout layout;
  for (double u : w.breaks) layout.add_break(u);
  layout.add_zone(w.lo, w.hi, freq);
  const BumpSpec& phi = profile.bump;
  auto integrand = [&](double u) {
    const double t = std::ldexp(1.0 - as * std::sqrt(u), k);
    const double a = phi(t);
    return a == 0.0 ? 0.0 : a * std::cos(freq * u);
  };
  return integrate(integrand, w.lo, w.hi, layout, cfg).scaled(std::numbers::pi * s2);
}

/// H_k(s) in the u-substitution form, with cos^2 integrated as is.
inline Estimate h_k_oscillatory(const RadialProfile& profile, int k, double s, const QuadratureConfig& cfg) {
  const double as = std::abs(s);
  if (as >= 1.0) return {};
  if (!(as > 0.0)) throw DomainError("h_k_oscillatory: u-substitution needs s != 0");
  const auto w = detail::lambda_window(profile, k, as);
  if (!(w.hi > w.lo)) return {};
  const double s2 = as * as;
  const double freq = pow8(k) * s2;
  OscillationLayout layout;
  for (double u : w.breaks) layout.add_break(u);
  layout.add_zone(w.lo, w.hi, 2.0 * freq);
  const BumpSpec& phi = profile.bump;
  auto integrand = [&](double u) {
    const double t = std::ldexp(1.0 - as * std::sqrt(u), k);
    const double a = phi(t);
    if (a == 0.0) return 0.0;
    const double c = std::cos(freq * u);
    return a * a * c * c;
  };
  return integrate(integrand, w.lo, w.hi, layout, cfg).scaled(std::numbers::pi * s2);
}

// ---------------------------------------------------------------------------
// Planes

/// Oriented plane {x in R^3 : x . theta = s}.
struct PlaneSpec3 {
  double s = 0.0;
  std::array<double, 3> theta{0.0, 0.0, 1.0};

  PlaneSpec3() = default;
  PlaneSpec3(double offset, std::array<double, 3> normal) : s(offset), theta(normal) { validate(); }

  void validate() const {
    const double n2 = theta[0] * theta[0] + theta[1] * theta[1] + theta[2] * theta[2];
    if (!(std::abs(std::sqrt(n2) - 1.0) <= 1e-12)) throw FrameError("PlaneSpec3: theta must be a unit vector");
  }
};

/// Two-dimensional plane p + span(e1, e2) in R^d, p orthogonal to the span.
struct PlaneSpecD {
  int d = 3;
  std::vector<double> p;
  std::vector<double> e1;
  std::vector<double> e2;

  static double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  double offset() const { return std::sqrt(dot(p, p)); }

  /// Throws FrameError if the frame violates orthonormality or p . e_i = 0 beyond tol.
  void validate(double tol = 1e-12) const {
    if (d < 3) throw FrameError("PlaneSpecD: d must be >= 3");
    if (p.size() != static_cast<std::size_t>(d) || e1.size() != p.size() || e2.size() != p.size()) {
      throw FrameError("PlaneSpecD: vector sizes must equal d");
    }
    const double pn = std::max(1.0, offset());
    if (std::abs(dot(e1, e1) - 1.0) > tol || std::abs(dot(e2, e2) - 1.0) > tol || std::abs(dot(e1, e2)) > tol ||
        std::abs(dot(p, e1)) > tol * pn || std::abs(dot(p, e2)) > tol * pn) {
      throw FrameError("PlaneSpecD: frame is not orthonormal or p is not orthogonal to it");
    }
  }

  PlaneSpecD with_swapped_orientation() const {
    PlaneSpecD q = *this;
    std::swap(q.e1, q.e2);
    return q;
  }

  static PlaneSpecD from_plane3(const PlaneSpec3& pl) {
    pl.validate();
    const auto& n = pl.theta;
    // any unit vector not parallel to n
    std::array<double, 3> a = std::abs(n[0]) < 0.9 ? std::array<double, 3>{1, 0, 0} : std::array<double, 3>{0, 1, 0};
    const double an = a[0] * n[0] + a[1] * n[1] + a[2] * n[2];
    std::array<double, 3> u{a[0] - an * n[0], a[1] - an * n[1], a[2] - an * n[2]};
    const double un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (double& x : u) x /= un;
    const std::array<double, 3> w{n[1] * u[2] - n[2] * u[1], n[2] * u[0] - n[0] * u[2], n[0] * u[1] - n[1] * u[0]};
    PlaneSpecD out;
    out.d = 3;
    out.p = {pl.s * n[0], pl.s * n[1], pl.s * n[2]};
    out.e1 = {u[0], u[1], u[2]};
    out.e2 = {w[0], w[1], w[2]};
    return out;
  }
};

/// Random 2-plane in R^d at the given distance from the origin: the frame and the
/// offset direction come from Gram-Schmidt on three Gaussian vectors.
template <class Rng>
PlaneSpecD random_plane_d(int d, double offset, Rng& rng) {
  if (d < 3) throw FrameError("random_plane_d: d must be >= 3");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::array<std::vector<double>, 3> v;
  for (auto& x : v) {
    x.resize(d);
    for (auto& c : x) c = gauss(rng);
  }
  for (int i = 0; i < 3; ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < i; ++j) {
        const double c = PlaneSpecD::dot(v[i], v[j]);
        for (int t = 0; t < d; ++t) v[i][t] -= c * v[j][t];
      }
    }
    const double n = std::sqrt(PlaneSpecD::dot(v[i], v[i]));
    for (auto& c : v[i]) c /= n;
  }
  PlaneSpecD out;
  out.d = d;
  out.e1 = v[0];
  out.e2 = v[1];
  out.p = v[2];
  for (auto& c : out.p) c *= offset;
  return out;
}

/// Point handed to 2-D integrands: in-plane coordinates and the ambient point.
struct PlanePoint {
  double u1;
  double u2;
  std::span<const double> x;
};

/// Radial structure the 2-D oracle may use for panelling: shells of the
/// profile (phase 8^k |x|^2 times harmonic), extra radii where the integrand
/// has transitions, and the radius outside which it vanishes.
struct RadialHints {
  const RadialProfile* profile = nullptr;
  int harmonic = 2;
  std::vector<double> extra_radii;
  double support_radius = 1.0;
};

enum class PlaneRule { polar, cartesian };

/// 2-D quadrature of F over a plane.
///
/// polar: adaptive Gauss in the in-plane radius about the foot point times an
///        angular trapezoid rule with cfg.angular_points nodes;
/// cartesian: fixed tensor Gauss over [-1.1, 1.1]^2, panel count from the hints.
template <class F>
Estimate integrate_plane_2d(const F& F_, const PlaneSpecD& plane, const QuadratureConfig& cfg, const RadialHints& hints,
                            PlaneRule rule = PlaneRule::polar) {
  const int d = plane.d;
  const double s = plane.offset();
  const double s2 = s * s;
  std::vector<double> x(d);
  auto point = [&](double u1, double u2) {
    for (int i = 0; i < d; ++i) x[i] = plane.p[i] + u1 * plane.e1[i] + u2 * plane.e2[i];
    return F_(PlanePoint{u1, u2, std::span<const double>(x)});
  };

  if (rule == PlaneRule::polar) {
    const double R = hints.support_radius;
    if (!(s < R)) return {};
    const double rho_max = std::sqrt(R * R - s2) + 0.05;
    auto rho_of = [s2](double r) { return std::sqrt(std::max(0.0, r * r - s2)); };
    OscillationLayout layout;
    layout.add_break(rho_of(R));
    for (double r : hints.extra_radii) {
      if (r > s) layout.add_break(rho_of(r));
    }
    if (hints.profile) {
      for (int k = 1; k <= hints.profile->k_max; ++k) {
        const auto br = hints.profile->shell_breaks(k);
        if (br[3] <= s) continue;
        for (double r : br) {
          if (r > s) layout.add_break(rho_of(r));
        }
        const double lo = rho_of(std::max(br[0], s));
        const double hi = rho_of(br[3]);
        layout.add_zone(lo, hi, hints.harmonic * pow8(k) * 2.0 * hi);
      }
    }
    const int n_phi = cfg.angular_points;
    const double dphi = 2.0 * std::numbers::pi / n_phi;
    auto ring = [&](double rho) {
      double acc = 0.0;
      for (int j = 0; j < n_phi; ++j) {
        const double phi = (j + 0.5) * dphi;
        acc += point(rho * std::cos(phi), rho * std::sin(phi));
      }
      return acc * dphi * rho;
    };
    Estimate e = integrate(ring, 0.0, rho_max, layout, cfg, cfg.oracle_rel_tol);
    e.evals *= n_phi;
    return e;
  }

  // cartesian tensor rule
  const double L = 1.1;
  double max_rate = 0.0;
  if (hints.profile) max_rate = hints.harmonic * pow8(hints.profile->k_max) * 2.0 * hints.support_radius;
  const std::int64_t per_axis = std::max<std::int64_t>(
      8, static_cast<std::int64_t>(std::ceil(2.0 * L * max_rate / cfg.phase_per_panel())));
  const GaussRule& hi = gauss_rule(cfg.gauss_order);
  const GaussRule& lo = gauss_rule(std::max(1, cfg.gauss_order / 2));
  const std::int64_t n_hi = static_cast<std::int64_t>(hi.nodes.size());
  const std::int64_t n_lo = static_cast<std::int64_t>(lo.nodes.size());
  const std::int64_t cost = per_axis * per_axis * (n_hi * n_hi + n_lo * n_lo);
  Estimate out;
  if (cost > cfg.max_evals) {
    out.budget_exceeded = true;
    return out;
  }
  const double h = 2.0 * L / static_cast<double>(per_axis);
  std::vector<double> rows_hi;
  std::vector<double> rows_lo;
  std::vector<double> rows_l1;
  for (std::int64_t i = 0; i < per_axis; ++i) {
    const double ci = -L + (i + 0.5) * h;
    for (std::int64_t j = 0; j < per_axis; ++j) {
      const double cj = -L + (j + 0.5) * h;
      double qh = 0.0;
      double l1 = 0.0;
      for (std::int64_t a = 0; a < n_hi; ++a) {
        for (std::int64_t b = 0; b < n_hi; ++b) {
          const double v = point(ci + 0.5 * h * hi.nodes[a], cj + 0.5 * h * hi.nodes[b]);
          const double w = hi.weights[a] * hi.weights[b];
          qh += w * v;
          l1 += w * std::abs(v);
        }
      }
      double ql = 0.0;
      for (std::int64_t a = 0; a < n_lo; ++a) {
        for (std::int64_t b = 0; b < n_lo; ++b) {
          ql += lo.weights[a] * lo.weights[b] * point(ci + 0.5 * h * lo.nodes[a], cj + 0.5 * h * lo.nodes[b]);
        }
      }
      const double jac = 0.25 * h * h;
      rows_hi.push_back(qh * jac);
      rows_lo.push_back(std::abs(qh - ql) * jac);
      rows_l1.push_back(l1 * jac);
    }
  }
  out.value = pairwise_sum(rows_hi);
  out.error = pairwise_sum(rows_lo);
  out.l1 = pairwise_sum(rows_l1);
  out.evals = cost;
  return out;
}

template <class F>
Estimate integrate_plane_2d(const F& F_, const PlaneSpec3& plane, const QuadratureConfig& cfg,
                            const RadialHints& hints, PlaneRule rule = PlaneRule::polar) {
  return integrate_plane_2d(F_, PlaneSpecD::from_plane3(plane), cfg, hints, rule);
}

}  // namespace wradon
