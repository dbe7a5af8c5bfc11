#pragma once

// Certification suite. Each check samples one estimate or identity of the
// construction on a fixed grid (or a seeded random sample), compares it with a
// bound computed from measured constants, and records the extremum.
//
// Reports are a pure function of (config, seed): per-item work runs on a
// worker pool but lands in fixed slots, and wall-clock times go to a separate
// timings file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "wradon/config.hpp"
#include "wradon/csv.hpp"
#include "wradon/errors.hpp"
#include "wradon/line_check.hpp"
#include "wradon/local.hpp"
#include "wradon/model.hpp"
#include "wradon/parallel.hpp"
#include "wradon/radon.hpp"
#include "wradon/serialize.hpp"
#include "wradon/w0.hpp"

namespace wradon {

inline constexpr const char* report_schema_version = "1";

enum class CheckStatus { pass, fail, inconclusive, skipped };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::inconclusive:
      return "inconclusive";
    case CheckStatus::skipped:
      return "skipped";
  }
  return "?";
}

struct CheckRecord {
  std::string id;
  std::string anchor;  ///< the estimate or identity under test
  std::string grid;
  std::string relation = "<=";  ///< measured <relation> bound
  double measured = 0.0;
  double bound = 0.0;
  CheckStatus status = CheckStatus::fail;
  std::string note;
  nlohmann::json details = nlohmann::json::object();

  void decide() {
    const bool ok = relation == "<=" ? measured <= bound : measured >= bound;
    status = ok ? CheckStatus::pass : CheckStatus::fail;
  }
};

inline CheckRecord check_record(std::string id, std::string anchor, std::string grid, std::string relation = "<=") {
  CheckRecord c;
  c.id = std::move(id);
  c.anchor = std::move(anchor);
  c.grid = std::move(grid);
  c.relation = std::move(relation);
  return c;
}

struct VerificationReport {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<CheckRecord> checks;
  std::vector<CsvTable> tables;
  std::vector<std::pair<std::string, double>> timings;  ///< seconds, not part of the report JSON

  const CheckRecord* find(const std::string& id) const {
    for (const auto& c : checks) {
      if (c.id == id) return &c;
    }
    return nullptr;
  }

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) {
      return c.status == CheckStatus::pass || c.status == CheckStatus::skipped;
    });
  }

  nlohmann::json to_json() const {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : checks) {
      cs.push_back({{"check_id", c.id},
                    {"anchor", c.anchor},
                    {"grid", c.grid},
                    {"relation", c.relation},
                    {"measured", c.measured},
                    {"bound", c.bound},
                    {"status", to_string(c.status)},
                    {"note", c.note},
                    {"details", c.details}});
    }
    return {{"schema", "wradon-report"}, {"version", report_schema_version}, {"passed", passed()}, {"meta", meta},
            {"checks", std::move(cs)}};
  }

  /// report.json, timings.json and one CSV per table.
  void write(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
      std::ofstream f(fs::path(dir) / "report.json", std::ios::binary);
      if (!f) throw FormatError("report: cannot write to " + dir);
      f << to_json().dump(2) << '\n';
    }
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [k, v] : timings) t[k] = v;
    std::ofstream f(fs::path(dir) / "timings.json", std::ios::binary);
    f << t.dump(2) << '\n';
    for (const auto& tab : tables) tab.write((fs::path(dir) / (tab.name + ".csv")).string());
  }
};

/// Everything the checks evaluate.
struct SuiteSubject {
  ModelPtr model;
  std::shared_ptr<const W0Profile> w0;
  std::shared_ptr<const AssembledWeight> weight;
  std::string source;  ///< "built" or "loaded"
};

inline std::shared_ptr<const AssembledWeight> build_weight(const RunConfig& cfg) {
  auto model = make_model(RadialProfile(default_phi(), cfg.k_max), cfg.quad);
  auto w0 = std::make_shared<const W0Profile>(model);
  const auto d0 = find_delta0(*w0);
  return std::make_shared<const AssembledWeight>(w0, build_cover(*model, d0.delta0, cfg.cover));
}

inline SuiteSubject make_subject(const RunConfig& cfg) {
  SuiteSubject sub;
  if (cfg.profile.empty()) {
    sub.weight = build_weight(cfg);
    sub.source = "built";
  } else {
    sub.weight = std::make_shared<const AssembledWeight>(load_profile(cfg.profile));
    sub.source = "loaded";
    if (sub.weight->model().k_max() != cfg.k_max) throw FormatError("profile k_max differs from config k_max");
  }
  sub.w0 = std::shared_ptr<const W0Profile>(sub.weight, &sub.weight->w0());
  sub.model = sub.w0->model_ptr();
  return sub;
}

namespace detail {

inline std::mt19937_64 check_rng(std::uint64_t seed, int check_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(check_index)};
  return std::mt19937_64(seq);
}

inline double value_of(const Estimate& e, const char* what) { return e.value_or_throw(what); }

inline double rel_diff(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

inline double max_abs_G(const Model& m, double lo, double hi, int n) {
  double best = 0.0;
  for (int i = 0; i <= n; ++i) best = std::max(best, std::abs(m.G(lo + (hi - lo) * i / n)));
  return best;
}

/// Offsets of the criterion-2 grid: 0.5 + 0.7 i / n, i = 1..n.
inline std::vector<double> w0_offsets(int n) {
  std::vector<double> s(n);
  for (int i = 1; i <= n; ++i) s[i - 1] = 0.5 + 0.7 * i / n;
  return s;
}

struct ZeroRun {
  double raw = 0.0;       ///< max |R|
  double residual = 0.0;  ///< max |R - G (1 - sum psi)|
  double truncation = 0.0;
  double error = 0.0;
  CsvTable table;
};

inline ZeroRun w0_zero_run(const W0Profile& w0, int n, int workers, const std::string& name) {
  const auto ss = w0_offsets(n);
  struct Row {
    double R, err, T;
  };
  auto rows = parallel_map<Row>(ss.size(), workers, [&](std::size_t i) {
    const Estimate e = rwf_reduced(w0, ss[i]);
    return Row{value_of(e, "R_W0 f"), e.error, w0.telescoped_transform(ss[i])};
  });
  ZeroRun z;
  z.table = {name, {"s", "R", "error_estimate", "telescoped", "G"}, {}};
  for (std::size_t i = 0; i < ss.size(); ++i) {
    z.raw = std::max(z.raw, std::abs(rows[i].R));
    z.residual = std::max(z.residual, std::abs(rows[i].R - rows[i].T));
    z.truncation = std::max(z.truncation, std::abs(rows[i].T));
    z.error = std::max(z.error, rows[i].err);
    z.table.add({ss[i], rows[i].R, rows[i].err, rows[i].T, w0.model().G(ss[i])});
  }
  return z;
}

}  // namespace detail

/// Runs every check in order. Checks that run out of quadrature budget are
/// marked inconclusive; the suite always runs to the end.
inline VerificationReport run_suite(const RunConfig& cfg, const SuiteSubject& sub) {
  using clk = std::chrono::steady_clock;
  VerificationReport rep;
  const Model& model = *sub.model;
  const W0Profile& w0 = *sub.w0;
  const AssembledWeight& W = *sub.weight;
  const RadialProfile& prof = model.profile();
  const GridConfig& g = cfg.grids;
  const int K = model.k_max();
  const int workers = cfg.workers;
  const ShellConstants lc = shell_constants(prof);
  const double scale_full = detail::max_abs_G(model, 0.0, 1.2, 12000);
  const double scale_w0 = detail::max_abs_G(model, 0.5, 1.2, 7000);
  const double tol = cfg.zero_tol;
  int index = 0;

  auto run = [&](CheckRecord c, const std::function<void(CheckRecord&, std::mt19937_64&)>& body) {
    auto rng = detail::check_rng(cfg.seed, index++);
    const auto t = clk::now();
    try {
      body(c, rng);
    } catch (const BudgetExceeded& e) {
      c.status = CheckStatus::inconclusive;
      c.note = std::string("quadrature budget exceeded: ") + e.what();
    } catch (const Error& e) {
      c.status = CheckStatus::fail;
      c.note = std::string("error: ") + e.what();
    }
    rep.timings.emplace_back(c.id, std::chrono::duration<double>(clk::now() - t).count());
    rep.checks.push_back(std::move(c));
  };

  // 1. radial profile
  run(check_record("radial_invariants", "f = sum f_k / k!, shells, plateau and support of Phi", std::to_string(g.radial_samples) + " uniform radii in [0, 1.1]; Phi on 20001 points of [0.7, 1.3]"),
      [&](CheckRecord& c, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> U(0.0, 1.1);
        double diff = 0.0;
        std::int64_t support_bad = 0;
        std::int64_t shell_bad = 0;
        for (int i = 0; i < g.radial_samples; ++i) {
          const double r = U(rng);
          const RadialPoint p = RadialPoint::from_radius(r);
          double brute = 0.0;
          int hits = 0;
          for (int k = 1; k <= K; ++k) {
            const double fk = prof.f_k(k, p);
            if (fk != 0.0) ++hits;
            brute += fk * inverse_factorial(k);
          }
          const double fv = prof.f(p);
          diff = std::max(diff, std::abs(fv - brute));
          if ((r < prof.support_inner() || r >= 1.0) && fv != 0.0) ++support_bad;
          if (hits > 2) ++shell_bad;
          const auto sh = prof.shell_of_radius(r);
          if (hits > 0 && !sh) ++shell_bad;
        }
        std::int64_t phi_bad = 0;
        double slope = 0.0;
        const BumpSpec& b = prof.bump;
        for (int i = 0; i <= 20000; ++i) {
          const double t = 0.7 + 0.6 * i / 20000;
          const double v = b(t);
          if (v < 0.0 || v > 1.0) ++phi_bad;
          if (b.on_plateau(t) && v != 1.0) ++phi_bad;
          if (!b.in_open_support(t) && v != 0.0) ++phi_bad;
          slope = std::max(slope, std::abs(b.derivative(t)));
        }
        c.measured = diff;
        c.bound = 4.0 * std::numeric_limits<double>::epsilon();
        c.details = {{"support_violations", support_bad},
                     {"shell_overlap_violations", shell_bad},
                     {"phi_violations", phi_bad},
                     {"phi_slope_sampled", slope},
                     {"phi_slope_max", prof.phi_derivative_max()},
                     {"g_tail_bound", model.g_tail_bound()}};
        c.decide();
        if (support_bad + shell_bad + phi_bad > 0 || slope > prof.phi_derivative_max()) c.status = CheckStatus::fail;
      });

  // 2. 1-D reductions against 2-D plane quadrature
  run(check_record("oracle_equivalence", "radial reduction of plane integrals", std::to_string(g.oracle_cases) + " random planes in R^3 cycling over {f, f_3^2, f_4^2, W f}; "
               "u-form vs r-form of G_k, H_k for k = 3..k_max", "<="),
      [&](CheckRecord& c, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> U(0.0, 1.0);
        struct Case {
          int kind;
          PlaneSpecD plane;
        };
        std::vector<Case> cases;
        for (int i = 0; i < g.oracle_cases; ++i) {
          const int kind = i % 4;
          const double top = kind == 1 ? prof.shell_outer(3) : kind == 2 ? prof.shell_outer(4) : 0.99;
          const double s = top * (0.02 + 0.96 * U(rng));
          cases.push_back({kind, random_plane_d(3, s, rng)});
        }
        struct Out {
          double one_d, two_d, rel;
        };
        auto outs = parallel_map<Out>(cases.size(), workers, [&](std::size_t i) {
          const auto& cs = cases[i];
          const double s = cs.plane.offset();
          RadialHints h;
          h.profile = &prof;
          h.harmonic = 2;
          if (cs.kind == 3) {
            const Estimate a = rwf_reduced(W, s);
            const Estimate b = rwf_plane_d(cs.plane, W, model.quad());
            const double va = detail::value_of(a, "1-D W f");
            const double vb = detail::value_of(b, "2-D W f");
            // both sides vanish; compare on the scale of |W f|
            return Out{va, vb, b.l1 == 0.0 ? 0.0 : std::abs(va - vb) / b.l1};
          }
          const int k = cs.kind == 1 ? 3 : 4;
          auto F = [&](const PlanePoint& pt) {
            double r2 = 0.0;
            for (double x : pt.x) r2 += x * x;
            const RadialPoint p = RadialPoint::from_square(r2);
            if (cs.kind == 0) return prof.f(p);
            const double v = prof.f_k(k, p);
            return v * v;
          };
          const double va = cs.kind == 0 ? model.G(s) : model.shell_h(k, s).total();
          const double vb = detail::value_of(integrate_plane_2d(F, cs.plane, model.quad(), h), "2-D plane integral");
          return Out{va, vb, detail::rel_diff(va, vb)};
        });
        CsvTable tab{"oracle", {"case", "kind", "s", "reduced", "plane_2d", "rel_diff"}, {}};
        double worst = 0.0;
        for (std::size_t i = 0; i < outs.size(); ++i) {
          worst = std::max(worst, outs[i].rel);
          tab.add({double(i), double(cases[i].kind), cases[i].plane.offset(), outs[i].one_d, outs[i].two_d,
                   outs[i].rel});
        }
        rep.tables.push_back(std::move(tab));
        double uform = 0.0;
        for (int k = 3; k <= K; ++k) {
          for (int j = 1; j <= 4; ++j) {
            const double s = 0.5 + (prof.shell_outer(k) - 0.5) * j / 5.0;
            const Estimate gu = g_k_oscillatory(prof, k, s, model.quad());
            const Estimate hu = h_k_oscillatory(prof, k, s, model.quad());
            const double gr = model.shell_g(k, s);
            const double hr = model.shell_h(k, s).total();
            uform = std::max(uform, std::abs(detail::value_of(gu, "u-form G_k") - gr) / std::max(gu.l1, 1e-300));
            uform = std::max(uform, detail::rel_diff(detail::value_of(hu, "u-form H_k"), hr));
          }
        }
        c.measured = std::max(worst, uform);
        c.bound = cfg.oracle_tol;
        c.details = {{"max_rel_plane", worst}, {"max_rel_u_vs_r", uform}};
        c.note = "W f cases compare |1-D - 2-D| against the L1 norm of W f; G_k u/r against the L1 norm of the u integrand";
        c.decide();
      });

  // 3. a priori bounds on G and H_k
  run(check_record("g_tail_bound", "|G(s)| <= c1 4^-m / m! for |s| >= 1 - 2^-m", "m = 3..k_max, " + std::to_string(g.bound_points) + " offsets on [1 - 2^-m, 1.2]"),
      [&](CheckRecord& c, std::mt19937_64&) {
        CsvTable tab{"g_tail", {"m", "s_at_max", "max_abs_G", "bound", "ratio"}, {}};
        double worst = 0.0;
        for (int m = 3; m <= K; ++m) {
          const double lo = 1.0 - pow2(-m);
          double best = 0.0;
          double at = lo;
          for (int i = 0; i <= g.bound_points; ++i) {
            const double s = lo + (1.2 - lo) * i / g.bound_points;
            const double v = std::abs(model.G(s));
            if (v > best) {
              best = v;
              at = s;
            }
          }
          const double bd = g_bound(prof, m);
          worst = std::max(worst, best / bd);
          tab.add({double(m), at, best, bd, best / bd});
        }
        rep.tables.push_back(std::move(tab));
        c.measured = worst;
        c.bound = 1.0;
        c.details = {{"c1", lc.c1}, {"G_quadrature_error", model.G_error()}};
        c.note = "measured is max |G| / bound over all m";
        c.decide();
      });

  run(check_record("h_lower_bound", "H_k(s) >= C2 2^-k for k >= k1, 1/2 < s <= 1 - 2^(1-k)", "k = k1..k_max, " + std::to_string(g.bound_points) + " offsets per k", ">="),
      [&](CheckRecord& c, std::mt19937_64&) {
        c.bound = 1.0;
        c.details = {{"k1", lc.k1}, {"C2", lc.C2}};
        if (lc.k1 > K) {
          c.status = CheckStatus::skipped;
          c.measured = 0.0;
          c.note = "k range empty: k1 = " + std::to_string(lc.k1) + " > k_max";
          return;
        }
        double worst = std::numeric_limits<double>::infinity();
        for (int k = lc.k1; k <= K; ++k) {
          const double hi = 1.0 - pow2(1 - k);
          for (int i = 1; i <= g.bound_points; ++i) {
            const double s = 0.5 + (hi - 0.5) * i / g.bound_points;
            worst = std::min(worst, model.shell_h(k, s).total() / (lc.C2 * pow2(-k)));
          }
        }
        c.measured = worst;
        c.note = "measured is min H_k / (C2 2^-k)";
        c.decide();
      });

  run(check_record("h_floor", "H_k(s) >= (pi/40) 2^-k - (pi/2) max|Phi'| 4^-k and H_k,1(s) >= (pi/40) 2^-k", "k = 3..k_max, " + std::to_string(g.bound_points) + " offsets on (1/2, 1 - 2^(1-k)]", ">="),
      [&](CheckRecord& c, std::mt19937_64&) {
        double gap = std::numeric_limits<double>::infinity();
        double h1_ratio = std::numeric_limits<double>::infinity();
        for (int k = 3; k <= K; ++k) {
          const double hi = 1.0 - pow2(1 - k);
          const double lb = h_k_lower_bound(prof, k);
          for (int i = 1; i <= g.bound_points; ++i) {
            const double s = 0.5 + (hi - 0.5) * i / g.bound_points;
            const HParts h = model.shell_h(k, s);
            gap = std::min(gap, h.total() - lb);
            h1_ratio = std::min(h1_ratio, h.h1 / (std::numbers::pi / 40.0 * pow2(-k)));
          }
        }
        c.measured = gap;
        c.bound = 0.0;
        c.details = {{"min_h1_ratio", h1_ratio}};
        c.note = "measured is min over k, s of H_k(s) minus its lower bound";
        c.decide();
        if (!(h1_ratio >= 1.0)) c.status = CheckStatus::fail;
      });

  // 4. partitions of unity
  run(check_record("partition_sums", "sum_k psi_k = 1 on (1/2, 1); sum_i xi_i = 1 on R", std::to_string(g.psi_points) + " points on (0.5 + 1e-6, 1 - 1e-6); " + std::to_string(g.xi_points) +
               " points on [-1.5, 1.5]"),
      [&](CheckRecord& c, std::mt19937_64&) {
        const DyadicPartition psi;
        double pm = 0.0;
        for (int i = 0; i < g.psi_points; ++i) {
          const double s = 0.5 + 1e-6 + (0.5 - 2e-6) * i / (g.psi_points - 1);
          pm = std::max(pm, std::abs(psi.sum(s) - 1.0));
        }
        double xm = 0.0;
        for (int i = 0; i < g.xi_points; ++i) {
          const double s = -1.5 + 3.0 * i / (g.xi_points - 1);
          xm = std::max(xm, std::abs(W.cover().xi_sum(s) - 1.0));
        }
        c.measured = std::max(pm, xm);
        c.bound = 1e-12;
        c.details = {{"psi_max_dev", pm}, {"xi_max_dev", xm}, {"N", W.cover().size()}};
        c.decide();
      });

  // 5. R_{W0} f = 0 above 1/2
  double negative_base = 0.0;
  run(check_record("w0_zero", "R_{W0} f(s) = 0 for |s| > 1/2", std::to_string(g.w0_zero_points) + " offsets 0.5 + 0.7 i / n, i = 1..n"),
      [&](CheckRecord& c, std::mt19937_64&) {
        auto z = detail::w0_zero_run(w0, g.w0_zero_points, workers, "w0_zero");
        rep.tables.push_back(std::move(z.table));
        c.measured = z.raw;
        c.bound = tol * scale_w0;
        negative_base = c.bound;
        c.details = {{"scale_max_abs_G", scale_w0},
                     {"telescoping_residual", z.residual},
                     {"truncation_term", z.truncation},
                     {"max_error_estimate", z.error},
                     {"raw_pass", z.raw <= c.bound}};
        c.note = "measured is max |R_W0 f|; at truncated k_max it equals G (1 - sum_{k<=k_max} psi_{k-2}) "
                 "up to the telescoping residual";
        // the identity holds at every truncation; the raw value also carries the truncation term
        c.status = z.residual <= c.bound ? CheckStatus::pass : CheckStatus::fail;
      });

  // 6. decay of 1 - W0
  run(check_record("w0_decay", "max over the dyadic window of |1 - W0| <= C 2^-k k^4, shell maxima decreasing", "k = 5..k_max, window (1 - 2^(3-k), 1 - 2^(1-k)), " + std::to_string(g.decay_points) + " points"),
      [&](CheckRecord& c, std::mt19937_64&) {
        CsvTable tab{"w0_decay", {"k", "max_dev", "bound", "ratio"}, {}};
        std::vector<int> ks;
        for (int k = 5; k <= K; ++k) ks.push_back(k);
        auto devs = parallel_map<double>(ks.size(), workers,
                                         [&](std::size_t i) { return window_deviation(w0, ks[i], g.decay_points); });
        double worst = 0.0;
        bool monotone = true;
        for (std::size_t i = 0; i < ks.size(); ++i) {
          const int k = ks[i];
          const double bd = lc.C * pow2(-k) * std::pow(double(k), 4);
          worst = std::max(worst, devs[i] / bd);
          tab.add({double(k), devs[i], bd, devs[i] / bd});
          if (k >= 7 && !(devs[i] < devs[i - 1])) monotone = false;
        }
        rep.tables.push_back(std::move(tab));
        const double hi = 1.0 - pow2(1 - K);
        const double c0 = decay_ratio(w0, 0.75, hi, g.decay_points);
        c.measured = worst;
        c.bound = 1.0;
        c.details = {{"C", lc.C}, {"c2", lc.c2}, {"shell_maxima_decreasing", monotone}, {"C0_ratio", c0}};
        c.note = "measured is max deviation / bound over k";
        c.decide();
        if (!monotone) c.status = CheckStatus::fail;
      });

  // 7. threshold
  Delta0Result d0;
  run(check_record("delta0", "W0 >= 1/2 for |s| >= delta0", "interval certification from the last shell down; " + std::to_string(g.delta0_recheck) +
               " random (r, s) with s in [delta0, 1.2], r in [s, 1.25]", ">="),
      [&](CheckRecord& c, std::mt19937_64& rng) {
        d0 = find_delta0(w0);
        const double used = W.cover().delta0();
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double wmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < g.delta0_recheck; ++i) {
          const double s = used + (1.2 - used) * U(rng);
          const double r = s + (1.25 - s) * U(rng);
          wmin = std::min(wmin, w0.eval(r, s));
        }
        c.measured = wmin;
        c.bound = 0.5;
        c.details = {{"delta0", used},
                     {"delta0_certified", d0.delta0},
                     {"certified_steps", d0.steps},
                     {"worst_certified_deviation", d0.worst_bound},
                     {"last_shell_outer", d0.top}};
        c.decide();
        if (used < d0.delta0) {
          c.status = CheckStatus::fail;
          c.note = "profile delta0 lies below the certified threshold";
        }
      });

  // 8. local weights
  run(check_record("local_zero", "R_{W_i} f = 0 on the window of local weight i", std::to_string(g.local_zero_weights) + " evenly spaced local weights x " +
               std::to_string(g.local_zero_points) + " offsets inside each window"),
      [&](CheckRecord& c, std::mt19937_64&) {
        const auto& L = W.cover().locals();
        const int nw = std::min<int>(g.local_zero_weights, static_cast<int>(L.size()));
        struct Item {
          std::size_t w;
          double s;
        };
        std::vector<Item> items;
        for (int j = 0; j < nw; ++j) {
          const std::size_t wi = nw == 1 ? 0 : static_cast<std::size_t>(std::llround(double(j) * (L.size() - 1) / (nw - 1)));
          for (int q = 0; q < g.local_zero_points; ++q) {
            const double u = -0.9 + 1.8 * (q + 0.5) / g.local_zero_points;
            items.push_back({wi, std::abs(L[wi].s0 + u * L[wi].eps)});
          }
        }
        auto vals = parallel_map<double>(items.size(), workers, [&](std::size_t i) {
          return detail::value_of(rwf_reduced(model, L[items[i].w], items[i].s), "R_Wi f");
        });
        CsvTable tab{"local_zero", {"index", "s0", "eps", "s", "R"}, {}};
        double worst = 0.0;
        for (std::size_t i = 0; i < items.size(); ++i) {
          worst = std::max(worst, std::abs(vals[i]));
          const auto& lw = L[items[i].w];
          tab.add({double(items[i].w), lw.s0, lw.eps, items[i].s, vals[i]});
        }
        rep.tables.push_back(std::move(tab));
        c.measured = worst;
        c.bound = tol * scale_full;
        c.details = {{"scale_max_abs_G", scale_full}};
        c.decide();
      });

  // 9. the assembled weight
  run(check_record("assembled_zero", "R_W f(s) = 0 for all s", std::to_string(g.zero_points) + " offsets 1.2 i / (n - 1), i = 0..n-1"),
      [&](CheckRecord& c, std::mt19937_64&) {
        const int n = g.zero_points;
        auto est = parallel_map<Estimate>(n, workers, [&](std::size_t i) {
          const double s = n == 1 ? 0.0 : 1.2 * double(i) / (n - 1);
          const Estimate e = rwf_reduced(W, s);
          detail::value_of(e, "R_W f");
          return e;
        });
        CsvTable tab{"assembled_zero", {"s", "R", "error_estimate", "G"}, {}};
        double worst = 0.0;
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
          const double s = n == 1 ? 0.0 : 1.2 * double(i) / (n - 1);
          worst = std::max(worst, std::abs(est[i].value));
          err = std::max(err, est[i].error);
          tab.add({s, est[i].value, est[i].error, model.G(s)});
        }
        rep.tables.push_back(std::move(tab));
        c.measured = worst;
        c.bound = tol * scale_full;
        c.details = {{"scale_max_abs_G", scale_full}, {"max_error_estimate", err}};
        c.decide();
      });

  // 10. positivity
  run(check_record("positivity", "W >= 1/2 everywhere", std::to_string(g.positivity_samples) + " random (r, s), s in [0, 1.2], r in [s, 1.25]", ">="),
      [&](CheckRecord& c, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::vector<std::pair<double, double>> pts(g.positivity_samples);
        for (auto& [r, s] : pts) {
          s = 1.2 * U(rng);
          r = s + (1.25 - s) * U(rng);
        }
        const auto before = W.counters().outside_support.load();
        constexpr std::size_t chunk = 256;
        const std::size_t nc = (pts.size() + chunk - 1) / chunk;
        auto mins = parallel_map<std::array<double, 3>>(nc, workers, [&](std::size_t ci) {
          std::array<double, 3> best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
          for (std::size_t i = ci * chunk; i < std::min(pts.size(), (ci + 1) * chunk); ++i) {
            const double v = W.eval(pts[i].first, pts[i].second);
            if (v < best[0]) best = {v, pts[i].first, pts[i].second};
          }
          return best;
        });
        std::array<double, 3> best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
        for (const auto& m : mins) {
          if (m[0] < best[0]) best = m;
        }
        const auto outside = W.counters().outside_support.load() - before;
        c.measured = best[0];
        c.bound = cfg.positivity_floor;
        c.details = {{"r_at_min", best[1]}, {"s_at_min", best[2]}, {"slices_off_support", outside}};
        c.decide();
        if (outside != 0) c.status = CheckStatus::fail;
      });

  // 11. 2-planes in R^4 and R^5
  run(check_record("higher_dim_planes", "2-plane transform in R^d equals the R^3 transform at equal offset and vanishes", std::to_string(g.higher_dim_planes) + " random 2-planes each in d = 4, 5, offsets in (0, 1.2)"),
      [&](CheckRecord& c, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> U(0.0, 1.0);
        std::vector<PlaneSpecD> planes;
        for (int d : {4, 5}) {
          for (int i = 0; i < g.higher_dim_planes; ++i) planes.push_back(random_plane_d(d, 1.2 * U(rng), rng));
        }
        struct Out {
          double f2, f1, w2, w1, l1;
        };
        auto outs = parallel_map<Out>(planes.size(), workers, [&](std::size_t i) {
          const auto& pl = planes[i];
          const double s = pl.offset();
          RadialHints h;
          h.profile = &prof;
          auto F = [&](const PlanePoint& pt) {
            double r2 = 0.0;
            for (double x : pt.x) r2 += x * x;
            return prof.f(RadialPoint::from_square(r2));
          };
          const double f2 = detail::value_of(integrate_plane_2d(F, pl, model.quad(), h), "plane f");
          const Estimate w2 = rwf_plane_d(pl, W, model.quad());
          const double w1 = detail::value_of(rwf_reduced(W, s), "R_W f");
          return Out{f2, model.G(s), detail::value_of(w2, "plane W f"), w1, w2.l1};
        });
        CsvTable tab{"higher_dim_planes", {"d", "s", "f_plane", "G", "Wf_plane", "Wf_reduced", "Wf_l1"}, {}};
        double rel = 0.0;
        double mag = 0.0;
        for (std::size_t i = 0; i < planes.size(); ++i) {
          const auto& o = outs[i];
          rel = std::max(rel, detail::rel_diff(o.f2, o.f1));
          if (o.l1 > 0.0) rel = std::max(rel, std::abs(o.w2 - o.w1) / o.l1);
          mag = std::max(mag, std::abs(o.w2));
          tab.add({double(planes[i].d), planes[i].offset(), o.f2, o.f1, o.w2, o.w1, o.l1});
        }
        rep.tables.push_back(std::move(tab));
        c.measured = mag;
        c.bound = tol * scale_full;
        c.details = {{"max_rel_vs_reduced", rel}, {"rel_tol", cfg.oracle_tol}, {"scale_max_abs_G", scale_full}};
        c.note = "measured is max |plane transform of W f|; f compared relative to max(|a|, |b|), W f against its L1 norm";
        c.decide();
        if (!(rel <= cfg.oracle_tol)) c.status = CheckStatus::fail;
      });

  // 12. sign changes along lines
  run(check_record("line_sign_change", "cos(8^k |x|^2) changes sign on every line crossing shell k", std::to_string(g.sign_change_lines) + " random lines, x0 uniform in the unit ball, "
               "k = max(3, ceil(log2(6 / (5 (1 - |x0|)))))"),
      [&](CheckRecord& c, std::mt19937_64& rng) {
        std::normal_distribution<double> N01(0.0, 1.0);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        CsvTable tab{"line_sign_change", {"x0_norm", "k", "t0", "t1", "t_pos", "t_neg", "found", "length_ok"}, {}};
        std::int64_t missing = 0;
        std::int64_t short_lines = 0;
        std::int64_t no_trigger = 0;
        for (int i = 0; i < g.sign_change_lines; ++i) {
          std::array<double, 3> a{N01(rng), N01(rng), N01(rng)};
          std::array<double, 3> b{N01(rng), N01(rng), N01(rng)};
          const double an = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
          for (double& x : a) x /= an;
          const double ab = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
          for (int t = 0; t < 3; ++t) b[t] -= ab * a[t];
          const double bn = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
          for (double& x : b) x /= bn;
          const double rho = std::cbrt(U(rng));
          const std::array<double, 3> x0{rho * a[0], rho * a[1], rho * a[2]};
          const int k = line_shell_index(rho);
          try {
            const auto ev = check_sign_change(x0, b, k, prof);
            if (!ev.found) ++missing;
            if (!ev.length_ok) ++short_lines;
            if (!ev.trigger_ok) ++no_trigger;
            tab.add({rho, double(k), ev.t0, ev.t1, ev.t_pos, ev.t_neg, double(ev.found), double(ev.length_ok)});
          } catch (const NoIntersection&) {
            ++missing;
            tab.add({rho, double(k), NAN, NAN, NAN, NAN, 0.0, 0.0});
          }
        }
        rep.tables.push_back(std::move(tab));
        c.measured = double(missing);
        c.bound = 0.0;
        c.details = {{"length_failures", short_lines}, {"trigger_failures", no_trigger}};
        c.note = "measured is the number of lines without sign-change evidence";
        c.decide();
        if (short_lines + no_trigger > 0) c.status = CheckStatus::fail;
      });

  // 13. a broken weight must fail the zero test
  if (cfg.negative_control) {
    run(check_record("negative_control", "W0 built with psi_{k-1} in place of psi_{k-2} must fail the R_{W0} f = 0 test", std::to_string(g.w0_zero_points) + " offsets 0.5 + 0.7 i / n", ">="),
        [&](CheckRecord& c, std::mt19937_64&) {
          const W0Profile bad(sub.model, w0.psi_shift() - 1);
          auto z = detail::w0_zero_run(bad, g.w0_zero_points, workers, "w0_negative");
          rep.tables.push_back(std::move(z.table));
          const double base = negative_base > 0.0 ? negative_base : tol * scale_w0;
          c.measured = z.raw / base;
          c.bound = 1e3;
          c.details = {{"max_abs_R", z.raw}, {"zero_bound", base}};
          c.note = "measured is max |R| of the tampered weight over the zero-test bound";
          c.decide();
        });
  }

  rep.meta = {{"k_max", K},
              {"seed", cfg.seed},
              {"check_count", rep.checks.size()},
              {"weight_source", sub.source},
              {"zero_tol", cfg.zero_tol},
              {"oracle_tol", cfg.oracle_tol},
              {"positivity_floor", cfg.positivity_floor},
              {"quadrature", to_json(model.quad())},
              {"delta0", W.cover().delta0()},
              {"N", W.cover().size()},
              {"coverage_end", W.cover().coverage_end()},
              {"phi_derivative_max", lc.phi_derivative_max},
              {"c1", lc.c1},
              {"C2", lc.C2},
              {"c2", lc.c2},
              {"k1", lc.k1},
              {"C", lc.C},
              {"g_tail_bound", model.g_tail_bound()},
              {"G_quadrature_error", model.G_error()},
              {"scale_max_abs_G", scale_full},
              {"scale_max_abs_G_above_half", scale_w0}};
  if (const auto* dec = rep.find("w0_decay"); dec && dec->details.contains("C0_ratio")) {
    rep.meta["C0_ratio"] = dec->details["C0_ratio"];
  }
  return rep;
}

inline VerificationReport run_suite(const RunConfig& cfg) { return run_suite(cfg, make_subject(cfg)); }

}  // namespace wradon
