#pragma once

// The weight W_0 on planes with offset |s| > 1/2:
//
//   W_0(r, s) = 1 - G(s) sum_{k=3}^{k_max} k! f_k(r) psi_{k-2}(|s|) / H_k(s),   |s| < 1,
//   W_0(r, s) = 1,                                                              |s| >= 1,
//
// where psi_k is a dyadic partition of unity on (1/2, 1). On supp psi_{k-2} the
// plane passes inside shell k, so H_k(s) is the full-shell constant there.
//
// With f truncated at k_max the partition sum used by W_0 only reaches
// psi_{k_max-2}; the transform then equals G(s) (1 - sum psi) exactly, which
// vanishes for |s| <= 1 - 2^-(k_max-2).

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "wradon/bump.hpp"
#include "wradon/errors.hpp"
#include "wradon/model.hpp"

namespace wradon {

/// psi_k(s) = S(tau - k + 1) - S(tau - k), tau = -log2(1 - s), on (1/2, 1).
struct DyadicPartition {
  int k_min = 1;
  int k_max = 60;

  static double tau(double s) { return -std::log2(1.0 - s); }

  double psi(int k, double s) const {
    if (k < k_min || k > k_max) return 0.0;
    const double as = std::abs(s);
    if (!(as > 0.5 && as < 1.0)) return 0.0;
    const double t = tau(as);
    return smooth_step(t - k + 1) - smooth_step(t - k);
  }

  /// Indices whose psi can be nonzero at s (at most two).
  std::array<int, 2> active(double s) const {
    const double as = std::abs(s);
    if (!(as > 0.5 && as < 1.0)) return {0, 0};
    const int a = static_cast<int>(std::floor(tau(as)));
    return {a, a + 1};
  }

  double sum(double s) const {
    double acc = 0.0;
    for (int k : active(s)) acc += psi(k, s);
    return acc;
  }

  /// Bound on |psi_k'| over [a, b] with b < 1.
  static double derivative_bound(double b) {
    return 2.0 * smooth_step_derivative_max() / ((1.0 - b) * std::numbers::ln2);
  }
};

/// One term k! psi_{k-shift}(s) G(s) / H_k of W_0 at a fixed offset.
struct W0Term {
  int k = 0;
  double coef = 0.0;
};

/// W_0 restricted to one plane offset; evaluation in r only touches the shell of r.
class W0Slice {
 public:
  W0Slice() = default;
  W0Slice(const RadialProfile* profile, double s, std::vector<W0Term> terms)
      : profile_(profile), s_(s), terms_(std::move(terms)) {}

  double offset() const { return s_; }
  const std::vector<W0Term>& terms() const { return terms_; }

  double operator()(RadialPoint p) const {
    if (terms_.empty()) return 1.0;
    const auto k = profile_->shell_of_radius(p.r);
    if (!k) return 1.0;
    for (const auto& t : terms_) {
      if (t.k == k->value()) return 1.0 - t.coef * profile_->f_k(t.k, p);
    }
    return 1.0;
  }

 private:
  const RadialProfile* profile_ = nullptr;
  double s_ = 0.0;
  std::vector<W0Term> terms_;
};

class W0Profile {
 public:
  /// psi_shift = 2 is the weight; any other value gives a deliberately broken one.
  explicit W0Profile(ModelPtr model, int psi_shift = 2) : model_(std::move(model)), shift_(psi_shift) {
    const int K = model_->k_max();
    h_full_.assign(K + 1, 0.0);
    sup_abs_.assign(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) {
      h_full_[k] = model_->shell_h(k, 0.0).total();
      sup_abs_[k] = model_->profile().shell_sup_abs(k);
    }
  }

  const Model& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  int psi_shift() const { return shift_; }
  const DyadicPartition& partition() const { return partition_; }

  double h_full(int k) const { return h_full_.at(k); }

  /// Shells k in [3, k_max] whose partition function is nonzero at s.
  std::vector<int> active_shells(double s) const {
    std::vector<int> out;
    for (int j : partition_.active(s)) {
      const int k = j + shift_;
      if (j >= 1 && k >= 3 && k <= model_->k_max() && partition_.psi(j, s) != 0.0) out.push_back(k);
    }
    return out;
  }

  W0Slice slice(double s) const {
    const double as = std::abs(s);
    if (!(as > 0.5)) throw DomainError("W0: offset must satisfy |s| > 1/2");
    if (as >= 1.0) return W0Slice(&model_->profile(), as, {});
    const double g = model_->G(as);
    return slice_with_g(as, g);
  }

  W0Slice slice_with_g(double as, double g) const {
    std::vector<W0Term> terms;
    for (int k : active_shells(as)) {
      const double psi = partition_.psi(k - shift_, as);
      const double hk = model_->profile().shell_inner(k) < as ? model_->shell_h(k, as).total() : h_full_[k];
      terms.push_back({k, g * factorial(k) * psi / hk});
    }
    return W0Slice(&model_->profile(), as, std::move(terms));
  }

  double eval(double r, double s) const {
    if (r < std::abs(s)) throw DomainError("W0: need r >= |s|");
    return slice(s)(RadialPoint::from_radius(r));
  }

  /// sum_{k=3}^{k_max} psi_{k-shift}(s).
  double partition_sum(double s) const {
    double acc = 0.0;
    for (int k : active_shells(s)) acc += partition_.psi(k - shift_, s);
    return acc;
  }

  /// Exact value of the transform of f under this weight: G(s) (1 - partition_sum(s)).
  double telescoped_transform(double s) const {
    const double as = std::abs(s);
    if (as >= 1.0) return 0.0;
    return model_->G(as) * (1.0 - partition_sum(as));
  }

  /// sup over r >= |s| of |1 - W_0(r, s)|.
  double deviation(double s) const {
    const double as = std::abs(s);
    if (!(as > 0.5)) throw DomainError("W0: offset must satisfy |s| > 1/2");
    if (as >= 1.0) return 0.0;
    const double g = model_->G(as);
    double d = 0.0;
    const W0Slice sl = slice_with_g(as, g);
    for (const auto& t : sl.terms()) d = std::max(d, std::abs(t.coef) * sup_abs_[t.k]);
    return d;
  }

  /// Upper bound of the deviation over [a, b] from values at b and analytic slope bounds:
  /// |G'(s)| = 2 pi s |f(s)|, |H_k'| <= 2 pi on shell k, |psi'| from the step.
  double deviation_bound(double a, double b) const {
    const auto& prof = model_->profile();
    if (b >= 1.0) throw DomainError("W0: deviation_bound needs b < 1");
    const double h = b - a;
    const double g_max = std::abs(model_->G(b)) + model_->G_slope_bound(a, b) * h;
    const double dpsi = DyadicPartition::derivative_bound(b);
    double best = 0.0;
    for (int k = 3; k <= model_->k_max(); ++k) {
      const int j = k - shift_;
      // psi_j nonzero somewhere on [a, b]
      const double ta = DyadicPartition::tau(std::max(a, 0.5));
      const double tb = DyadicPartition::tau(b);
      if (j < 1 || tb <= j - 1 || ta >= j + 1) continue;
      const double psi = std::min(1.0, partition_.psi(j, b) + dpsi * h);
      double h_min = h_full_[k];
      if (prof.shell_inner(k) < b) h_min = model_->shell_h(k, b).total() - 2.0 * std::numbers::pi * h;
      if (!(h_min > 0.0)) return std::numeric_limits<double>::infinity();
      best = std::max(best, factorial(k) * psi / h_min * sup_abs_[k]);
    }
    return g_max * best;
  }

 private:
  ModelPtr model_;
  int shift_;
  DyadicPartition partition_;
  std::vector<double> h_full_;
  std::vector<double> sup_abs_;
};

// ---------------------------------------------------------------------------
// Constants of the a priori estimates

struct ShellConstants {
  double phi_max = 1.0;
  double phi_derivative_max = 0.0;
  double c1 = 0.0;  ///< (4 pi / 3) max |Phi'|
  int k1 = 0;       ///< smallest k >= 3 with C2 > 0
  double C2 = 0.0;  ///< pi / 40 - 2^-k1 (pi / 2) max |Phi| max |Phi'|
  double c2 = 0.0;  ///< 1 / C2
  double C = 0.0;   ///< 2^12 c1^2 c2, the decay constant of |1 - W_0|
};

inline ShellConstants shell_constants(const RadialProfile& profile) {
  ShellConstants c;
  c.phi_derivative_max = profile.phi_derivative_max();
  c.c1 = 4.0 * std::numbers::pi / 3.0 * c.phi_derivative_max;
  const double a = std::numbers::pi / 40.0;
  const double b = 0.5 * std::numbers::pi * c.phi_max * c.phi_derivative_max;
  for (int k = 3; k < 64; ++k) {
    if (a - std::ldexp(b, -k) > 0.0) {
      c.k1 = k;
      break;
    }
  }
  c.C2 = a - std::ldexp(b, -c.k1);
  c.c2 = 1.0 / c.C2;
  c.C = 4096.0 * c.c1 * c.c1 * c.c2;
  return c;
}

/// Pointwise lower bound of H_k on offsets 1/2 < s <= 1 - 2^-(k-1).
inline double h_k_lower_bound(const RadialProfile& profile, int k) {
  const double pm = profile.phi_derivative_max();
  return std::numbers::pi / 40.0 * pow2(-k) - 0.5 * std::numbers::pi * std::ldexp(pm, -2 * k);
}

/// Bound |G(s)| <= c1 4^-m / m! for |s| >= 1 - 2^-m.
inline double g_bound(const RadialProfile& profile, int m) {
  return 4.0 * std::numbers::pi / 3.0 * profile.phi_derivative_max() * std::ldexp(1.0, -2 * m) * inverse_factorial(m);
}

// ---------------------------------------------------------------------------
// Threshold offset

struct Delta0Options {
  double h_max = 1e-3;
  double h_min = 1e-10;
  double level = 0.5;  ///< certify W_0 >= level
};

struct Delta0Result {
  double delta0 = 1.0;
  double top = 1.0;            ///< above this offset G vanishes identically (truncated f)
  std::int64_t steps = 0;      ///< certified intervals
  double worst_bound = 0.0;    ///< largest certified deviation bound
};

/// Walks down from the outer radius of the last shell, certifying intervals
/// [a, b] with deviation_bound(a, b) <= 1 - level. Stops at the first offset
/// that cannot be certified with steps down to h_min.
inline Delta0Result find_delta0(const W0Profile& w0, const Delta0Options& opt = {}) {
  Delta0Result res;
  const auto& prof = w0.model().profile();
  res.top = prof.shell_outer(prof.k_max);
  const double limit = 1.0 - opt.level;
  double b = res.top;
  double h = opt.h_max;
  while (b > 0.5) {
    const double a = std::max(0.5, b - h);
    const double d = w0.deviation_bound(a, b);
    if (d <= limit) {
      res.worst_bound = std::max(res.worst_bound, d);
      ++res.steps;
      b = a;
      h = std::min(opt.h_max, 2.0 * h);
      continue;
    }
    h *= 0.5;
    if (h < opt.h_min) break;
  }
  if (!(b > 0.5)) {
    // whole range certified; W_0 is undefined at 1/2 itself
    b = 0.5 + opt.h_min;
  }
  if (!(b < 1.0)) throw NotFound("find_delta0: no threshold below 1 certified");
  res.delta0 = b;
  return res;
}

/// max over a uniform grid on [lo, hi] of |1 - W_0| / (rho (log2 1/rho)^4), rho = 1 - s.
inline double decay_ratio(const W0Profile& w0, double lo, double hi, int n) {
  double best = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = lo + (hi - lo) * i / n;
    const double rho = 1.0 - s;
    const double l = std::log2(1.0 / rho);
    best = std::max(best, w0.deviation(s) / (rho * l * l * l * l));
  }
  return best;
}

/// max of |1 - W_0| over the dyadic window (1 - 2^(3-k), 1 - 2^(1-k)), sampled with n points.
inline double window_deviation(const W0Profile& w0, int k, int n) {
  const double lo = 1.0 - std::ldexp(1.0, 3 - k);
  const double hi = 1.0 - std::ldexp(1.0, 1 - k);
  double best = 0.0;
  for (int i = 1; i < n; ++i) best = std::max(best, w0.deviation(lo + (hi - lo) * i / n));
  return best;
}

}  // namespace wradon
