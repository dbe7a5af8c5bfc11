#pragma once

// Weighted transforms of f.
//
// For a weight depending on (|x|, |x . theta|) only, the plane integral reduces to
//
//   R_W f(s) = pi int_{s^2}^{1} W(sqrt v, s) f(sqrt v) dv.
//
// On 2-planes in R^d the weight is taken as W(|x|, dist(P, 0)); the 2-D oracle
// integrates it on the plane itself.

#include <cmath>
#include <numbers>
#include <vector>

#include "wradon/errors.hpp"
#include "wradon/local.hpp"
#include "wradon/model.hpp"
#include "wradon/plane.hpp"
#include "wradon/w0.hpp"

namespace wradon {

/// Weight equal to 1 everywhere.
struct UnitSlice {
  double operator()(RadialPoint) const { return 1.0; }
};

template <class S>
concept HasBreaks = requires(const S& s, OscillationLayout& l) { s.add_breaks(l); };

/// pi int_{s^2}^1 slice(r) f(r) dv for a weight already fixed at offset s.
template <class Slice>
Estimate rwf_with_slice(const Model& model, const Slice& slice, double s) {
  const double as = std::abs(s);
  if (!(as < 1.0)) return {};
  OscillationLayout layout = model.layout(2);
  if constexpr (HasBreaks<Slice>) slice.add_breaks(layout);
  const RadialProfile& prof = model.profile();
  auto integrand = [&](double v) {
    const RadialPoint p = RadialPoint::from_square(v);
    const double fv = prof.f(p);
    return fv == 0.0 ? 0.0 : slice(p) * fv;
  };
  return integrate(integrand, as * as, 1.0, layout, model.quad()).scaled(std::numbers::pi);
}

inline Estimate rwf_reduced(const Model& model, double s) { return rwf_with_slice(model, UnitSlice{}, s); }

inline Estimate rwf_reduced(const W0Profile& w0, double s) {
  const double as = std::abs(s);
  if (!(as > 0.5)) throw DomainError("rwf_reduced: W0 needs |s| > 1/2");
  if (as >= 1.0) return {};
  return rwf_with_slice(w0.model(), w0.slice(as), as);
}

inline Estimate rwf_reduced(const Model& model, const LocalWeight& w, double s) {
  const double as = std::abs(s);
  if (as >= 1.0) return {};
  return rwf_with_slice(model, local_slice(model, w, as), as);
}

inline Estimate rwf_reduced(const AssembledWeight& w, double s) {
  const double as = std::abs(s);
  if (as >= 1.0) return {};
  return rwf_with_slice(w.model(), w.slice(as), as);
}

/// Radii where the assembled weight at offset s has transitions.
inline std::vector<double> weight_radii(const AssembledWeight& w, double s) {
  std::vector<double> out;
  const double s2 = s * s;
  for (const auto& e : w.cover().active(s)) {
    if (e.index < 0) continue;
    const auto& b = w.cover().locals()[static_cast<std::size_t>(e.index)].psi1;
    for (double rho : {b.rise_start, b.rise_end, b.fall_start, b.fall_end}) out.push_back(std::sqrt(s2 + rho * rho));
  }
  return out;
}

/// Transform on a 2-plane in R^d by 2-D quadrature on the plane.
inline Estimate rwf_plane_d(const PlaneSpecD& plane, const AssembledWeight& w, const QuadratureConfig& cfg) {
  plane.validate(1e-10);
  const double s = plane.offset();
  if (!(s < 1.0)) return {};
  const AssembledSlice slice = w.slice(s);
  const RadialProfile& prof = w.model().profile();
  auto F = [&](const PlanePoint& pt) {
    double r2 = 0.0;
    for (double c : pt.x) r2 += c * c;
    const RadialPoint p = RadialPoint::from_square(r2);
    const double fv = prof.f(p);
    return fv == 0.0 ? 0.0 : slice(p) * fv;
  };
  RadialHints hints;
  hints.profile = &prof;
  hints.harmonic = 2;
  hints.extra_radii = weight_radii(w, s);
  return integrate_plane_2d(F, plane, cfg, hints);
}

}  // namespace wradon
