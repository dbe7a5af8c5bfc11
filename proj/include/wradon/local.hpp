#pragma once

// Local weights for offsets |s| <= delta0, the cover of [0, delta0] by their
// windows, and the assembled weight
//
//   W(r, s) = xi_0(|s|) W_0(r, s) + sum_i xi_i(|s|) W_i(r, s).
//
// A local weight centred at s0 is
//
//   W_i(r, s) = 1 - psi1(rho) m0(s) / n0(s),   rho = sqrt(r^2 - s^2),
//   m0(s) = G(s),   n0(s) = pi int f(sqrt v) psi1(sqrt(v - s^2)) dv,
//
// with psi1 a bump in the in-plane radius that sits on one constant-sign lobe
// of f. Its transform is m0 - (m0 / n0) n0 = 0 wherever n0 != 0.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "wradon/bump.hpp"
#include "wradon/errors.hpp"
#include "wradon/model.hpp"
#include "wradon/w0.hpp"

namespace wradon {

struct LocalWeight {
  double s0 = 0.0;
  double eps = 0.0;
  BumpSpec psi1;            ///< in the in-plane radius rho
  int shell = 0;            ///< shell of the lobe under psi1
  int sign = 0;             ///< sign of f on the lobe, and of n0 on the window
  double r_star = 0.0;      ///< point of the lobe with Phi >= phi_level, nearest its crest
  double m0_s0 = 0.0;
  double n0_s0 = 0.0;
  bool m0_vanishes = false; ///< |m0(s0)| below the quadrature error of G; sign was free

  double window_lo() const { return std::max(0.0, s0 - eps); }
  double window_hi() const { return s0 + eps; }
};

/// n0(s) for a local weight.
inline Estimate local_denominator(const Model& model, const LocalWeight& w, double s) {
  const double s2 = s * s;
  const auto& b = w.psi1;
  const double lo = s2 + b.rise_start * b.rise_start;
  const double hi = std::min(1.0, s2 + b.fall_end * b.fall_end);
  if (!(hi > lo)) return {};
  const RadialProfile& prof = model.profile();
  OscillationLayout layout;
  std::array<int, 4> shells{};
  int n_shells = 0;
  for (int k = 1; k <= prof.k_max; ++k) {
    const auto br = prof.shell_breaks(k);
    const double a = br[0] * br[0];
    const double c = br[3] * br[3];
    if (c <= lo || a >= hi) continue;
    for (double r : br) layout.add_break(r * r);
    layout.add_zone(a, c, pow8(k));
    if (n_shells < 4) shells[n_shells++] = k;
  }
  if (n_shells == 0) return {};
  for (double rho : {b.rise_start, b.rise_end, b.fall_start, b.fall_end}) layout.add_break(s2 + rho * rho);
  auto integrand = [&](double v) {
    const double wb = b(std::sqrt(std::max(0.0, v - s2)));
    if (wb == 0.0) return 0.0;
    const RadialPoint p = RadialPoint::from_square(v);
    double fv = 0.0;
    for (int i = 0; i < n_shells; ++i) fv += prof.f_k(shells[i], p) * inverse_factorial(shells[i]);
    return fv * wb;
  };
  return integrate(integrand, lo, hi, layout, model.quad()).scaled(std::numbers::pi);
}

/// Bound on |n0'| over offsets [a, b].
inline double local_denominator_slope(const Model& model, const LocalWeight& w, double a, double b) {
  const auto& p = w.psi1;
  const double wa = p.rise_start * p.rise_start;
  const double wb = p.fall_end * p.fall_end;
  const double r_lo = std::sqrt(a * a + wa);
  const double r_hi = std::min(1.0, std::sqrt(b * b + wb));
  const auto& prof = model.profile();
  const double dphi = prof.phi_derivative_max();
  double fp = 0.0;
  for (int k = 1; k <= prof.k_max; ++k) {
    if (prof.shell_inner(k) < r_hi && prof.shell_outer(k) > r_lo) {
      fp = std::max(fp, (pow2(k) * dphi + 2.0 * pow8(k)) * inverse_factorial(k));
    }
  }
  return std::numbers::pi * (wb - wa) * fp;
}

/// A local weight at a fixed offset.
class LocalSlice {
 public:
  LocalSlice() = default;
  LocalSlice(const LocalWeight* w, double s, double q) : w_(w), s2_(s * s), q_(q) {}

  double ratio() const { return q_; }

  double operator()(RadialPoint p) const {
    const double rho2 = p.r2 - s2_;
    if (!(rho2 > 0.0)) return 1.0 - w_->psi1(0.0) * q_;
    return 1.0 - w_->psi1(std::sqrt(rho2)) * q_;
  }

  void add_breaks(OscillationLayout& layout) const {
    const auto& b = w_->psi1;
    for (double rho : {b.rise_start, b.rise_end, b.fall_start, b.fall_end}) layout.add_break(s2_ + rho * rho);
  }

 private:
  const LocalWeight* w_ = nullptr;
  double s2_ = 0.0;
  double q_ = 0.0;
};

inline LocalSlice local_slice(const Model& model, const LocalWeight& w, double s) {
  const double as = std::abs(s);
  const double n0 = local_denominator(model, w, as).value;
  if (n0 == 0.0) throw DomainError("local weight: denominator vanishes at this offset");
  return LocalSlice(&w, as, model.G(as) / n0);
}

inline double local_eval(const Model& model, const LocalWeight& w, double r, double s) {
  if (r < std::abs(s)) throw DomainError("local weight: need r >= |s|");
  return local_slice(model, w, s)(RadialPoint::from_radius(r));
}

// ---------------------------------------------------------------------------
// Construction

struct LocalOptions {
  double eps_start = 0.05;
  double eps_min = 1e-6;
  double denominator_floor = 0.25;  ///< |n0(s)| >= floor |n0(s0)| on the window
  double ratio_cap = 0.5;           ///< m0 / n0 <= cap, so W >= 1 - cap
  int max_lobes = 200;
  double phi_level = 0.5;           ///< lobes must reach a radius where Phi >= phi_level
  int candidates = 2;               ///< lobes tried per centre; the widest window wins
  std::int64_t max_cells = 1 << 16; ///< interval budget of one window check
};

struct Lobe {
  int k = 0;
  double v_lo = 0.0;
  double v_hi = 0.0;
  int sign = 0;
  double r_star = 0.0;
};

/// Abscissae [t_lo, t_hi] on which the bump is at least level (0 < level <= 1).
inline std::pair<double, double> bump_level_set(const BumpSpec& b, double level) {
  auto solve = [&](double lo, double hi, bool rising) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool above = b(mid) >= level;
      if (above == rising) hi = mid; else lo = mid;
    }
    return rising ? hi : lo;
  };
  return {solve(b.rise_start, b.rise_end, true), solve(b.fall_start, b.fall_end, false)};
}

/// Constant-sign lobes of f on plane offsets >= s0 that reach a point where
/// Phi >= phi_level, by increasing shell.
inline std::vector<Lobe> lobes_above(const RadialProfile& prof, double s0, int max_lobes, double phi_level = 0.5) {
  std::vector<Lobe> out;
  const double s2 = s0 * s0;
  const auto [t_lo, t_hi] = bump_level_set(prof.bump, phi_level);
  for (int k = 1; k <= prof.k_max && static_cast<int>(out.size()) < max_lobes; ++k) {
    const double va = std::max(prof.shell_inner(k) * prof.shell_inner(k), s2);
    const double vb = prof.shell_outer(k) * prof.shell_outer(k);
    if (!(vb > va)) continue;
    const double g_in = 1.0 - t_hi * pow2(-k);
    const double g_out = 1.0 - t_lo * pow2(-k);
    const double pin = g_in * g_in;
    const double pout = g_out * g_out;
    const double w = pow8(k);
    const double pi = std::numbers::pi;
    const auto n_lo = static_cast<std::int64_t>(std::ceil(w * va / pi - 0.5));
    const auto n_hi = static_cast<std::int64_t>(std::floor(w * vb / pi + 0.5));
    for (std::int64_t n = n_lo; n <= n_hi && static_cast<int>(out.size()) < max_lobes; ++n) {
      const double lo = std::max(va, (static_cast<double>(n) - 0.5) * pi / w);
      const double hi = std::min(vb, (static_cast<double>(n) + 0.5) * pi / w);
      if (!(hi > lo)) continue;
      const double plo = std::max(lo, pin);
      const double phi = std::min(hi, pout);
      if (!(phi >= plo)) continue;
      const double centre = std::clamp(static_cast<double>(n) * pi / w, plo, phi);
      out.push_back({k, lo, hi, (n % 2 == 0) ? 1 : -1, std::sqrt(centre)});
    }
  }
  return out;
}

namespace detail {

inline LocalWeight weight_on_lobe(const Lobe& lobe, double s0) {
  LocalWeight w;
  w.s0 = s0;
  const double s2 = s0 * s0;
  const double ra = std::sqrt(std::max(0.0, lobe.v_lo - s2));
  const double rb = std::sqrt(lobe.v_hi - s2);
  const double q = 0.25 * (rb - ra);
  w.psi1 = BumpSpec(ra, ra + q, rb - q, rb);
  w.shell = lobe.k;
  w.sign = lobe.sign;
  w.r_star = lobe.r_star;
  return w;
}

// true if on |s| in [lo, hi]: sign n0 = w.sign, |n0| >= floor |n0(s0)|, m0 / n0 <= cap
inline bool window_holds(const Model& model, const LocalWeight& w, double lo, double hi, const LocalOptions& opt) {
  const double sigma = w.sign;
  const double n_floor = opt.denominator_floor * std::abs(w.n0_s0);
  auto point_ok = [&](double s, double& n, double& m) {
    n = sigma * local_denominator(model, w, s).value;
    m = sigma * model.G(s);
    return n >= n_floor && m / n <= opt.ratio_cap;
  };
  double n = 0.0;
  double m = 0.0;
  if (!point_ok(lo, n, m) || !point_ok(hi, n, m)) return false;
  struct Cell {
    double a;
    double b;
  };
  std::vector<Cell> stack;
  constexpr int initial = 8;
  for (int i = initial - 1; i >= 0; --i) stack.push_back({lo + (hi - lo) * i / initial, lo + (hi - lo) * (i + 1) / initial});
  std::int64_t cells = 0;
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    if (++cells > opt.max_cells) return false;
    const double mid = 0.5 * (c.a + c.b);
    if (!point_ok(mid, n, m)) return false;
    const double half = 0.5 * (c.b - c.a);
    const double n_lo = n - local_denominator_slope(model, w, c.a, c.b) * half;
    const double m_hi = m + model.G_slope_bound(c.a, c.b) * half;
    const bool ok = n_lo >= n_floor && (m_hi <= 0.0 || m_hi / n_lo <= opt.ratio_cap);
    if (ok) continue;
    if (half < 1e-13) return false;
    stack.push_back({mid, c.b});
    stack.push_back({c.a, mid});
  }
  return true;
}

// largest eps in the halving sequence whose window holds; 0 if none above eps_min
inline double find_window(const Model& model, const LocalWeight& w, double cap, const LocalOptions& opt) {
  double eps = std::min(opt.eps_start, cap - w.s0);
  while (eps >= opt.eps_min) {
    if (window_holds(model, w, std::max(0.0, w.s0 - eps), w.s0 + eps, opt)) return eps;
    eps *= 0.5;
  }
  return 0.0;
}

}  // namespace detail

/// Local weight centred at s0 in [0, delta0]; its window stays below (1 + delta0) / 2.
inline LocalWeight build_local_weight(const Model& model, double s0, double delta0, const LocalOptions& opt = {}) {
  if (!(s0 >= 0.0 && s0 <= delta0)) throw DomainError("build_local_weight: need 0 <= s0 <= delta0");
  const double m0 = model.G(s0);
  const bool vanishes = std::abs(m0) <= model.G_error();
  const int want = vanishes ? 0 : (m0 > 0.0 ? -1 : 1);

  struct Scored {
    LocalWeight w;
    double score;
  };
  std::vector<Scored> scored;
  for (const Lobe& lobe : lobes_above(model.profile(), s0, opt.max_lobes, opt.phi_level)) {
    if (want != 0 && lobe.sign != want) continue;
    LocalWeight w = detail::weight_on_lobe(lobe, s0);
    w.m0_s0 = m0;
    w.m0_vanishes = vanishes;
    w.n0_s0 = local_denominator(model, w, s0).value;
    if (!(w.sign * w.n0_s0 > 0.0)) continue;
    scored.push_back({w, std::abs(w.n0_s0)});
  }
  if (scored.empty()) throw SignSearchFailed("build_local_weight: no lobe of the required sign above s0");
  // lowest shell first, larger denominators first within a shell
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& x, const Scored& y) {
    if (x.w.shell != y.w.shell) return x.w.shell < y.w.shell;
    return x.score > y.score;
  });

  const double cap = 0.5 * (1.0 + delta0);
  std::optional<LocalWeight> best;
  int shells_seen = 0;
  int prev_shell = 0;
  int tried_in_shell = 0;
  for (const auto& c : scored) {
    if (c.w.shell != prev_shell) {
      // a lower shell with a window always beats a higher one
      if (best && shells_seen >= 1) break;
      prev_shell = c.w.shell;
      ++shells_seen;
      tried_in_shell = 0;
    }
    if (tried_in_shell >= opt.candidates) continue;
    LocalWeight w = c.w;
    w.eps = detail::find_window(model, w, cap, opt);
    if (w.eps == 0.0) continue;
    ++tried_in_shell;
    if (!best || w.eps > best->eps) best = w;
  }
  if (!best) throw ConstructionFailed("build_local_weight: window half-width fell below eps_min");
  return *best;
}

// ---------------------------------------------------------------------------
// Cover and partition

struct CoverOptions {
  int n_max = 8192;
  LocalOptions local;
};

class CoverPartition {
 public:
  CoverPartition() = default;

  CoverPartition(std::vector<LocalWeight> locals, double delta0) : locals_(std::move(locals)), delta0_(delta0) {
    if (locals_.empty()) throw ConstructionFailed("CoverPartition: no local weights");
    const auto& last = locals_.back();
    c_ = last.s0 + 0.5 * last.eps;
    if (!(c_ > delta0_)) throw ConstructionFailed("CoverPartition: windows stop short of delta0");
    bumps_.reserve(locals_.size());
    for (const auto& w : locals_) bumps_.push_back(BumpSpec(-0.9 * w.eps, -0.5 * w.eps, 0.5 * w.eps, 0.9 * w.eps));
    index_.assign(buckets, {});
    for (std::size_t i = 0; i < locals_.size(); ++i) {
      const double lo = std::max(0.0, locals_[i].s0 - 0.9 * locals_[i].eps);
      const double hi = locals_[i].s0 + 0.9 * locals_[i].eps;
      for (int b = bucket(lo); b <= bucket(hi); ++b) index_[b].push_back(static_cast<int>(i));
    }
  }

  const std::vector<LocalWeight>& locals() const { return locals_; }
  std::size_t size() const { return locals_.size(); }
  double delta0() const { return delta0_; }
  /// End of the plateau coverage; xi_0 = 1 from here on.
  double coverage_end() const { return c_; }

  /// Unnormalised bump of local i (0-based) at |s|.
  double chi(std::size_t i, double s) const {
    const double as = std::abs(s);
    const double s0 = locals_[i].s0;
    double v = bumps_[i](as - s0);
    if (s0 > 0.0) v += bumps_[i](as + s0);
    return v;
  }

  double chi0(double s) const {
    const double as = std::abs(s);
    return smooth_step((as - delta0_) / (c_ - delta0_));
  }

  struct Entry {
    int index;  ///< -1 for W_0, else local index
    double xi;
  };

  /// Nonzero partition functions at s; they sum to 1.
  std::vector<Entry> active(double s) const {
    const double as = std::abs(s);
    std::vector<Entry> out;
    double total = 0.0;
    const double x0 = chi0(as);
    if (x0 > 0.0) {
      out.push_back({-1, x0});
      total += x0;
    }
    if (as < 1.0) {
      for (int i : index_[bucket(as)]) {
        const double x = chi(static_cast<std::size_t>(i), as);
        if (x > 0.0) {
          out.push_back({i, x});
          total += x;
        }
      }
    }
    for (auto& e : out) e.xi /= total;
    return out;
  }

  double xi(int index, double s) const {
    for (const auto& e : active(s)) {
      if (e.index == index) return e.xi;
    }
    return 0.0;
  }

  double xi_sum(double s) const {
    double t = 0.0;
    for (const auto& e : active(s)) t += e.xi;
    return t;
  }

 private:
  static constexpr int buckets = 1 << 14;
  static int bucket(double s) { return std::clamp(static_cast<int>(s * buckets), 0, buckets - 1); }

  std::vector<LocalWeight> locals_;
  std::vector<BumpSpec> bumps_;
  std::vector<std::vector<int>> index_;
  double delta0_ = 0.0;
  double c_ = 0.0;
};

/// Greedy sweep s_1 = 0, s_{i+1} = s_i + eps_i / 2, until the plateaus reach past delta0.
inline CoverPartition build_cover(const Model& model, double delta0, const CoverOptions& opt = {}) {
  if (!(delta0 > 0.5 && delta0 < 1.0)) throw DomainError("build_cover: delta0 must lie in (1/2, 1)");
  std::vector<LocalWeight> locals;
  double s = 0.0;
  while (true) {
    if (static_cast<int>(locals.size()) >= opt.n_max) {
      throw CoverTooLarge("build_cover: more than n_max local weights needed");
    }
    locals.push_back(build_local_weight(model, s, delta0, opt.local));
    const double next = s + 0.5 * locals.back().eps;
    if (next > delta0) break;
    s = next;
  }
  return CoverPartition(std::move(locals), delta0);
}

// ---------------------------------------------------------------------------
// Assembled weight

/// Counts of weight slices built, for checking that no W_i is touched off supp xi_i.
struct AccessCounters {
  std::atomic<std::int64_t> w0{0};
  std::atomic<std::int64_t> local{0};
  std::atomic<std::int64_t> outside_support{0};
};

class AssembledSlice {
 public:
  std::optional<std::pair<double, W0Slice>> w0;
  std::vector<std::pair<double, LocalSlice>> locals;

  double operator()(RadialPoint p) const {
    double v = 0.0;
    if (w0) v += w0->first * w0->second(p);
    for (const auto& [xi, sl] : locals) v += xi * sl(p);
    return v;
  }

  void add_breaks(OscillationLayout& layout) const {
    for (const auto& [xi, sl] : locals) sl.add_breaks(layout);
  }
};

class AssembledWeight {
 public:
  AssembledWeight(std::shared_ptr<const W0Profile> w0, CoverPartition cover)
      : w0_(std::move(w0)), cover_(std::move(cover)), counters_(std::make_shared<AccessCounters>()) {}

  const W0Profile& w0() const { return *w0_; }
  const Model& model() const { return w0_->model(); }
  const CoverPartition& cover() const { return cover_; }
  AccessCounters& counters() const { return *counters_; }

  AssembledSlice slice(double s) const {
    const double as = std::abs(s);
    AssembledSlice out;
    for (const auto& e : cover_.active(as)) {
      if (!(e.xi > 0.0)) {
        counters_->outside_support.fetch_add(1, std::memory_order_relaxed);
        continue;
      }
      if (e.index < 0) {
        if (!(as > cover_.delta0())) counters_->outside_support.fetch_add(1, std::memory_order_relaxed);
        counters_->w0.fetch_add(1, std::memory_order_relaxed);
        out.w0.emplace(e.xi, w0_->slice(as));
      } else {
        const auto& lw = cover_.locals()[static_cast<std::size_t>(e.index)];
        if (!(std::abs(as - lw.s0) < 0.9 * lw.eps || as + lw.s0 < 0.9 * lw.eps)) {
          counters_->outside_support.fetch_add(1, std::memory_order_relaxed);
        }
        counters_->local.fetch_add(1, std::memory_order_relaxed);
        out.locals.emplace_back(e.xi, local_slice(model(), lw, as));
      }
    }
    return out;
  }

  double eval(double r, double s) const {
    if (r < std::abs(s)) throw DomainError("assembled weight: need r >= |s|");
    return slice(s)(RadialPoint::from_radius(r));
  }

 private:
  std::shared_ptr<const W0Profile> w0_;
  CoverPartition cover_;
  std::shared_ptr<AccessCounters> counters_;
};

}  // namespace wradon
