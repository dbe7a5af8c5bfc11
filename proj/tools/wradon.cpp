// wradon: build, verify and sample the positive weight with a vanishing transform.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wradon/config.hpp"
#include "wradon/csv.hpp"
#include "wradon/line_check.hpp"
#include "wradon/radon.hpp"
#include "wradon/serialize.hpp"
#include "wradon/verify.hpp"

namespace {

using namespace wradon;

struct Common {
  std::string config;
  int k_max = -1;
  std::int64_t seed = -1;
  int workers = -1;
  std::string profile;
  std::string output_dir;
};

void add_common(CLI::App* app, Common& c, bool with_profile) {
  app->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--k-max", c.k_max, "number of shells in f")->check(CLI::Range(1, 12));
  app->add_option("--seed", c.seed, "base seed")->check(CLI::NonNegativeNumber);
  app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  if (with_profile) app->add_option("--profile", c.profile, "prebuilt weight profile")->check(CLI::ExistingFile);
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (c.k_max > 0) cfg.k_max = c.k_max;
  if (c.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(c.seed);
    cfg.quad.rng_seed = cfg.seed;
  }
  if (c.workers > 0) cfg.workers = c.workers;
  if (!c.profile.empty()) cfg.profile = c.profile;
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  return cfg;
}

std::shared_ptr<const AssembledWeight> obtain_weight(const RunConfig& cfg) {
  return make_subject(cfg).weight;
}

std::array<double, 3> parse3(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw CLI::ValidationError(what, "needs exactly 3 components");
  return {v[0], v[1], v[2]};
}

int cmd_build(const Common& c, const std::string& out) {
  const RunConfig cfg = resolve(c);
  auto w = build_weight(cfg);
  save_profile(*w, out);
  std::printf("k_max=%d delta0=%.17g N=%zu -> %s\n", cfg.k_max, w->cover().delta0(), w->cover().size(), out.c_str());
  return 0;
}

int cmd_verify(const Common& c) {
  const RunConfig cfg = resolve(c);
  const auto rep = run_suite(cfg);
  rep.write(cfg.output_dir);
  for (const auto& ck : rep.checks) {
    std::printf("%-20s %-12s measured=%.6e %s bound=%.6e\n", ck.id.c_str(), to_string(ck.status), ck.measured,
                ck.relation.c_str(), ck.bound);
  }
  std::printf("%s (report in %s)\n", rep.passed() ? "PASS" : "FAIL", cfg.output_dir.c_str());
  return rep.passed() ? 0 : 1;
}

// Cubic Hermite interpolation of G on a uniform grid, with G' = -2 pi s f(s).
struct GInterpolant {
  std::vector<double> s, g, dg;
  GInterpolant(const Model& m, double lo, double hi, int n) {
    for (int i = 0; i <= n; ++i) {
      const double x = lo + (hi - lo) * i / n;
      s.push_back(x);
      g.push_back(m.G(x));
      dg.push_back(-2.0 * std::numbers::pi * x * m.profile().f(std::abs(x)));
    }
  }
  double operator()(double x) const {
    const std::size_t n = s.size() - 1;
    const double h = s[1] - s[0];
    const std::size_t i = std::min(n - 1, static_cast<std::size_t>(std::max(0.0, (x - s[0]) / h)));
    const double t = (x - s[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * g[i] + (t3 - 2 * t2 + t) * h * dg[i] + (-2 * t3 + 3 * t2) * g[i + 1] +
           (t3 - t2) * h * dg[i + 1];
  }
};

int cmd_sample(const Common& c, double lo, double hi, int points, int r_points, const std::string& out) {
  RunConfig cfg = resolve(c);
  auto w = obtain_weight(cfg);
  const Model& m = w->model();
  std::vector<std::string> header{"s", "W_min", "W_max", "RWf", "RWf_error", "G"};
  for (int j = 0; j < r_points; ++j) header.push_back("W0_r" + std::to_string(j));
  CsvTable tab{"sample", header, {}};
  const int n = std::max(points, 2);
  std::optional<GInterpolant> gi;
  if (m.quad().interpolate_profiles) gi.emplace(m, lo, hi, std::max(64, n / 8));
  struct Row {
    std::vector<double> v;
  };
  auto rows = parallel_map<Row>(n, cfg.workers, [&](std::size_t i) {
    const double s = lo + (hi - lo) * double(i) / (n - 1);
    const double as = std::abs(s);
    const AssembledSlice sl = w->slice(as);
    double wmin = INFINITY;
    double wmax = -INFINITY;
    for (int j = 0; j <= 200; ++j) {
      const double r = as + (1.25 - as) * j / 200.0;
      const double v = sl(RadialPoint::from_radius(r));
      wmin = std::min(wmin, v);
      wmax = std::max(wmax, v);
    }
    const Estimate e = rwf_with_slice(m, sl, as);
    std::vector<double> v{s, wmin, wmax, e.value, e.error, gi ? (*gi)(s) : m.G(s)};
    for (int j = 0; j < r_points; ++j) {
      const double r = as + (1.0 - std::min(as, 1.0)) * (r_points == 1 ? 0.0 : double(j) / (r_points - 1));
      v.push_back(as > 0.5 ? w->w0().eval(r, as) : NAN);
    }
    return Row{std::move(v)};
  });
  for (auto& r : rows) tab.add(std::move(r.v));
  if (out.empty() || out == "-") {
    std::cout << tab.str();
  } else {
    tab.write(out);
  }
  return 0;
}

int cmd_line(const std::vector<double>& x0v, const std::vector<double>& omv, int k, int k_max) {
  const auto x0 = parse3(x0v, "--x0");
  const auto om = parse3(omv, "--omega");
  const double xn = std::sqrt(x0[0] * x0[0] + x0[1] * x0[1] + x0[2] * x0[2]);
  if (k <= 0) k = line_shell_index(xn);
  const RadialProfile prof(default_phi(), std::max(k, k_max));
  try {
    const auto ev = check_sign_change(x0, om, k, prof);
    const nlohmann::json j = {{"k", ev.k},
                              {"t0", ev.t0},
                              {"t1", ev.t1},
                              {"step", ev.step},
                              {"samples", ev.samples},
                              {"t_pos", std::isnan(ev.t_pos) ? nlohmann::json(nullptr) : nlohmann::json(ev.t_pos)},
                              {"t_neg", std::isnan(ev.t_neg) ? nlohmann::json(nullptr) : nlohmann::json(ev.t_neg)},
                              {"found", ev.found},
                              {"length_ok", ev.length_ok},
                              {"trigger_ok", ev.trigger_ok}};
    std::cout << j.dump(2) << '\n';
    return ev.found && ev.length_ok ? 0 : 1;
  } catch (const NoIntersection& e) {
    std::cout << nlohmann::json{{"k", k}, {"error", "NoIntersection"}, {"what", e.what()}}.dump(2) << '\n';
    return 1;
  }
}

int cmd_plane(const Common& c, int d, double offset) {
  const RunConfig cfg = resolve(c);
  auto w = obtain_weight(cfg);
  std::mt19937_64 rng(cfg.seed);
  const PlaneSpecD pl = random_plane_d(d, offset, rng);
  const Estimate two = rwf_plane_d(pl, *w, w->model().quad());
  const Estimate one = rwf_reduced(*w, offset);
  const double scale = detail::max_abs_G(w->model(), 0.0, 1.2, 12000);
  const bool ok = std::abs(two.value) <= cfg.zero_tol * scale &&
                  (two.l1 == 0.0 || std::abs(two.value - one.value) <= cfg.oracle_tol * two.l1);
  const nlohmann::json j = {{"d", d},          {"offset", offset},          {"plane_value", two.value},
                            {"plane_error", two.error}, {"plane_l1", two.l1}, {"reduced_value", one.value},
                            {"G", w->model().G(offset)}, {"scale_max_abs_G", scale}, {"pass", ok}};
  std::cout << j.dump(2) << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Radon transform counterexample: build, verify, sample"};
  app.require_subcommand(1);

  Common c;
  std::string build_out = "wradon-profile.json";
  auto* build = app.add_subcommand("build", "construct the assembled weight and write its profile");
  add_common(build, c, false);
  build->add_option("-o,--output", build_out, "profile path");

  auto* verify = app.add_subcommand("verify", "run the certification suite");
  add_common(verify, c, true);
  verify->add_option("--output-dir", c.output_dir, "directory for report.json, timings.json and CSVs");

  double lo = 0.0, hi = 1.2;
  int points = 0, r_points = 5;
  std::string sample_out;
  auto* sample = app.add_subcommand("sample", "CSV of W bounds, R_W f, G and W0 on an offset grid");
  add_common(sample, c, true);
  sample->add_option("--s-min", lo, "first offset");
  sample->add_option("--s-max", hi, "last offset");
  sample->add_option("--points", points, "offsets (default: grids.sample_points)");
  sample->add_option("--r-points", r_points, "W0 columns on r in [s, 1]")->check(CLI::NonNegativeNumber);
  sample->add_option("-o,--output", sample_out, "CSV path, - for stdout");

  std::vector<double> x0, omega;
  int line_k = 0;
  auto* line = app.add_subcommand("line-check", "sign change of cos(8^k |x|^2) along x0 + t omega");
  line->add_option("--x0", x0, "point on the line, orthogonal to omega")->expected(3)->required();
  line->add_option("--omega", omega, "unit direction")->expected(3)->required();
  line->add_option("--k", line_k, "shell (default: smallest admissible)");

  int dim = 4;
  double offset = 0.5;
  auto* plane = app.add_subcommand("plane-d", "transform of W f on one random 2-plane in R^d");
  add_common(plane, c, true);
  plane->add_option("--d", dim, "ambient dimension")->check(CLI::Range(3, 16));
  plane->add_option("--offset", offset, "distance of the plane from the origin")->check(CLI::Range(0.0, 2.0));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*build) return cmd_build(c, build_out);
    if (*verify) return cmd_verify(c);
    if (*sample) {
      if (points <= 0) points = resolve(c).grids.sample_points;
      return cmd_sample(c, lo, hi, points, r_points, sample_out);
    }
    if (*line) return cmd_line(x0, omega, line_k, 8);
    if (*plane) return cmd_plane(c, dim, offset);
  } catch (const wradon::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
