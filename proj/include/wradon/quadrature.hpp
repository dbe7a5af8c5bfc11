#pragma once

// Composite Gauss-Legendre quadrature for smooth, possibly fast oscillating
// integrands whose phase rate is known piecewise in advance.
//
// The interval is split at caller-supplied breakpoints; inside each piece the
// panel length is capped so that the phase advances by at most
// pi * points_per_oscillation / gauss_order per panel. Panels are then refined
// globally (worst error first) until the summed error estimate drops below
// target_rel_tol times the L1 norm of the integrand. The error estimate of a
// panel is the difference between the gauss_order rule and the rule of half
// that order on the same panel.
//
// Results are summed pairwise in panel order, so they do not depend on the
// refinement history or on how callers distribute work across threads.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "wradon/errors.hpp"

namespace wradon {

struct QuadratureConfig {
  double target_rel_tol = 1e-9;      ///< 1-D reductions
  double oracle_rel_tol = 1e-6;      ///< 2-D oracles
  std::int64_t max_evals = 400'000'000;
  int points_per_oscillation = 12;
  int gauss_order = 16;
  int mc_samples = 20;               ///< random orientations for oracle sweeps
  std::uint64_t rng_seed = 20170901;
  bool interpolate_profiles = false; ///< cubic interpolation of G/H_k, plotting only
  int angular_points = 8;            ///< trapezoid points in the polar 2-D oracle

  void validate() const {
    if (!(target_rel_tol > 0.0) || !(oracle_rel_tol > 0.0)) {
      throw std::invalid_argument("QuadratureConfig: tolerances must be positive");
    }
    if (points_per_oscillation < 4) throw std::invalid_argument("QuadratureConfig: points_per_oscillation >= 4");
    if (gauss_order < 2 || gauss_order > 128) throw std::invalid_argument("QuadratureConfig: gauss_order in [2, 128]");
    if (max_evals <= 0) throw std::invalid_argument("QuadratureConfig: max_evals must be positive");
    if (angular_points < 1) throw std::invalid_argument("QuadratureConfig: angular_points >= 1");
  }

  /// Phase allowed per panel.
  double phase_per_panel() const {
    return std::numbers::pi * static_cast<double>(points_per_oscillation) / static_cast<double>(gauss_order);
  }
};

/// Value of a quadrature with its error estimate and the L1 norm of the integrand.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  std::int64_t evals = 0;
  bool budget_exceeded = false;

  Estimate& operator+=(const Estimate& o) {
    value += o.value;
    error += o.error;
    l1 += o.l1;
    evals += o.evals;
    budget_exceeded = budget_exceeded || o.budget_exceeded;
    return *this;
  }

  Estimate scaled(double c) const {
    Estimate e = *this;
    e.value *= c;
    e.error *= std::abs(c);
    e.l1 *= std::abs(c);
    return e;
  }

  /// Throws BudgetExceeded if the budget ran out; otherwise returns the value.
  double value_or_throw(const char* what) const {
    if (budget_exceeded) throw BudgetExceeded(what, value, error);
    return value;
  }
};

// ---------------------------------------------------------------------------
// Gauss-Legendre rules

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], increasing
  std::vector<double> weights;
};

namespace detail {

inline GaussRule make_gauss_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Cached n-point Gauss-Legendre rule, 1 <= n <= 128. Thread safe.
inline const GaussRule& gauss_rule(int n) {
  if (n < 1 || n > 128) throw std::invalid_argument("gauss_rule: order out of range");
  static std::array<std::once_flag, 129> flags;
  static std::array<std::unique_ptr<GaussRule>, 129> rules;
  std::call_once(flags[n], [n] { rules[n] = std::make_unique<GaussRule>(detail::make_gauss_rule(n)); });
  return *rules[n];
}

/// Pairwise (cascade) summation; the result depends only on the order of terms.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// ---------------------------------------------------------------------------
// Oscillation layout

/// Breakpoints and piecewise-constant phase rates on the real line.
/// Outside every zone the integrand is treated as non-oscillatory.
class OscillationLayout {
 public:
  struct Zone {
    double lo;
    double hi;
    double rate;  // d(phase)/dx
  };

  void add_break(double x) { breaks_.push_back(x); }

  void add_zone(double lo, double hi, double rate) {
    zones_.push_back({lo, hi, rate});
    breaks_.push_back(lo);
    breaks_.push_back(hi);
  }

  const std::vector<Zone>& zones() const { return zones_; }
  const std::vector<double>& breaks() const { return breaks_; }

  double rate_at(double x) const {
    double r = 0.0;
    for (const auto& z : zones_) {
      if (x >= z.lo && x <= z.hi) r = std::max(r, z.rate);
    }
    return r;
  }

  /// Sorted distinct breakpoints strictly inside (a, b), framed by a and b.
  std::vector<double> partition(double a, double b) const {
    std::vector<double> pts{a, b};
    for (double x : breaks_) {
      if (x > a && x < b) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

 private:
  std::vector<double> breaks_;
  std::vector<Zone> zones_;
};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double l1;
};

struct PanelIntegral {
  Estimate estimate;
  std::vector<Panel> panels;  // ordered by position
};

namespace detail {

template <class F>
Panel eval_panel(const F& f, double a, double b, const GaussRule& hi, const GaussRule& lo) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double q_hi = 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i < hi.nodes.size(); ++i) {
    const double v = f(mid + half * hi.nodes[i]);
    q_hi += hi.weights[i] * v;
    l1 += hi.weights[i] * std::abs(v);
  }
  double q_lo = 0.0;
  for (std::size_t i = 0; i < lo.nodes.size(); ++i) q_lo += lo.weights[i] * f(mid + half * lo.nodes[i]);
  q_hi *= half;
  q_lo *= half;
  l1 *= half;
  return {a, b, q_hi, std::abs(q_hi - q_lo), l1};
}

}  // namespace detail

/// Integrates f over [a, b] following the layout, keeping the final panels.
template <class F>
PanelIntegral integrate_panels(const F& f, double a, double b, const OscillationLayout& layout,
                               const QuadratureConfig& cfg, double rel_tol) {
  PanelIntegral out;
  if (!(b > a)) return out;
  const int n_hi = cfg.gauss_order;
  const int n_lo = std::max(1, cfg.gauss_order / 2);
  const GaussRule& hi = gauss_rule(n_hi);
  const GaussRule& lo = gauss_rule(n_lo);
  const std::int64_t per_panel = n_hi + n_lo;
  const double phase_cap = cfg.phase_per_panel();

  std::vector<Panel> panels;
  std::vector<char> alive;
  std::int64_t evals = 0;

  const auto pts = layout.partition(a, b);
  std::vector<std::int64_t> counts(pts.size() > 1 ? pts.size() - 1 : 0, 1);
  std::int64_t planned = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double rate = layout.rate_at(0.5 * (pts[i] + pts[i + 1]));
    if (rate > 0.0) {
      const double want = std::ceil((pts[i + 1] - pts[i]) * rate / phase_cap);
      counts[i] = want >= 9e15 ? std::int64_t(9e15) : std::max<std::int64_t>(1, static_cast<std::int64_t>(want));
    }
    planned += std::min<std::int64_t>(counts[i], cfg.max_evals);
  }
  // the resolving layout alone would overrun the budget
  if (planned > cfg.max_evals / per_panel) {
    out.estimate.value = std::numeric_limits<double>::quiet_NaN();
    out.estimate.error = std::numeric_limits<double>::infinity();
    out.estimate.budget_exceeded = true;
    return out;
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo_x = pts[i];
    const double hi_x = pts[i + 1];
    const std::int64_t n = counts[i];
    const double h = (hi_x - lo_x) / static_cast<double>(n);
    for (std::int64_t j = 0; j < n; ++j) {
      const double pa = lo_x + h * static_cast<double>(j);
      const double pb = (j + 1 == n) ? hi_x : lo_x + h * static_cast<double>(j + 1);
      panels.push_back(detail::eval_panel(f, pa, pb, hi, lo));
      alive.push_back(1);
      evals += per_panel;
    }
  }

  double total_err = 0.0;
  double total_l1 = 0.0;
  for (const auto& p : panels) {
    total_err += p.error;
    total_l1 += p.l1;
  }

  // worst error first; ties broken by position for determinism
  auto worse = [&panels](std::size_t x, std::size_t y) {
    if (panels[x].error != panels[y].error) return panels[x].error < panels[y].error;
    return panels[x].a > panels[y].a;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> heap(worse);
  for (std::size_t i = 0; i < panels.size(); ++i) heap.push(i);

  bool budget_exceeded = false;
  int since_resum = 0;
  while (!heap.empty() && total_err > rel_tol * total_l1 && total_err > 0.0) {
    if (evals + 2 * per_panel > cfg.max_evals) {
      budget_exceeded = true;
      break;
    }
    const std::size_t idx = heap.top();
    heap.pop();
    const Panel p = panels[idx];
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b) || (p.b - p.a) <= 1e-14 * (std::abs(p.a) + std::abs(p.b))) {
      continue;  // cannot split further; stays as is
    }
    alive[idx] = 0;
    const Panel left = detail::eval_panel(f, p.a, m, hi, lo);
    const Panel right = detail::eval_panel(f, m, p.b, hi, lo);
    evals += 2 * per_panel;
    total_err += left.error + right.error - p.error;
    total_l1 += left.l1 + right.l1 - p.l1;
    panels.push_back(left);
    alive.push_back(1);
    heap.push(panels.size() - 1);
    panels.push_back(right);
    alive.push_back(1);
    heap.push(panels.size() - 1);
    if (++since_resum == 4096) {
      since_resum = 0;
      total_err = 0.0;
      total_l1 = 0.0;
      for (std::size_t i = 0; i < panels.size(); ++i) {
        if (alive[i]) {
          total_err += panels[i].error;
          total_l1 += panels[i].l1;
        }
      }
    }
  }

  for (std::size_t i = 0; i < panels.size(); ++i) {
    if (alive[i]) out.panels.push_back(panels[i]);
  }
  std::sort(out.panels.begin(), out.panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  std::vector<double> vals;
  std::vector<double> errs;
  std::vector<double> l1s;
  vals.reserve(out.panels.size());
  errs.reserve(out.panels.size());
  l1s.reserve(out.panels.size());
  for (const auto& p : out.panels) {
    vals.push_back(p.value);
    errs.push_back(p.error);
    l1s.push_back(p.l1);
  }
  out.estimate.value = pairwise_sum(vals);
  out.estimate.error = pairwise_sum(errs);
  out.estimate.l1 = pairwise_sum(l1s);
  out.estimate.evals = evals;
  out.estimate.budget_exceeded = budget_exceeded;
  return out;
}

template <class F>
Estimate integrate(const F& f, double a, double b, const OscillationLayout& layout, const QuadratureConfig& cfg,
                   double rel_tol) {
  return integrate_panels(f, a, b, layout, cfg, rel_tol).estimate;
}

template <class F>
Estimate integrate(const F& f, double a, double b, const OscillationLayout& layout, const QuadratureConfig& cfg) {
  return integrate(f, a, b, layout, cfg, cfg.target_rel_tol);
}

/// Integral of a resolved integrand from any point of [a, b] to b, using the
/// converged panels of one adaptive pass. Only the panel containing the lower
/// limit is re-integrated.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;

  template <class F>
  CumulativeIntegral(const F& f, double a, double b, const OscillationLayout& layout, const QuadratureConfig& cfg)
      : a_(a), b_(b), order_(cfg.gauss_order) {
    PanelIntegral pi = integrate_panels(f, a, b, layout, cfg, cfg.target_rel_tol);
    total_ = pi.estimate;
    starts_.reserve(pi.panels.size() + 1);
    suffix_.assign(pi.panels.size() + 1, 0.0);
    for (const auto& p : pi.panels) starts_.push_back(p.a);
    for (std::size_t i = pi.panels.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + pi.panels[i].value;
    ends_.reserve(pi.panels.size());
    for (const auto& p : pi.panels) ends_.push_back(p.b);
  }

  const Estimate& total() const { return total_; }
  double lower() const { return a_; }
  double upper() const { return b_; }

  /// Integral over [x, b]; 0 for x >= b and the full integral for x <= a.
  template <class F>
  double from(const F& f, double x) const {
    if (x >= b_ || starts_.empty()) return 0.0;
    if (x <= a_) return total_.value;
    auto it = std::upper_bound(starts_.begin(), starts_.end(), x);
    const std::size_t idx = static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
    const double pb = ends_[idx];
    double partial = 0.0;
    if (x < pb) {
      const GaussRule& rule = gauss_rule(order_);
      const double mid = 0.5 * (x + pb);
      const double half = 0.5 * (pb - x);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) partial += rule.weights[i] * f(mid + half * rule.nodes[i]);
      partial *= half;
    }
    return partial + suffix_[idx + 1];
  }

 private:
  double a_ = 0.0;
  double b_ = 0.0;
  int order_ = 16;
  Estimate total_;
  std::vector<double> starts_;
  std::vector<double> ends_;
  std::vector<double> suffix_;
};

}  // namespace wradon
