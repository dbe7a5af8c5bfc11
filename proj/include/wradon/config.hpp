#pragma once

// Run configuration of the verification suite and the CLI, read from JSON.
// Every key is optional; see docs/config.md for the key set.

#include <cstdint>
#include <fstream>
#include <string>

#include "json.hpp"
#include "wradon/errors.hpp"
#include "wradon/local.hpp"
#include "wradon/quadrature.hpp"

namespace wradon {

struct GridConfig {
  int psi_points = 10000;
  int xi_points = 10000;
  int w0_zero_points = 50;
  int zero_points = 200;
  int positivity_samples = 100000;
  int decay_points = 20000;
  int bound_points = 4000;      ///< s-grid per m (G bound) and per k (H bounds)
  int oracle_cases = 20;
  int higher_dim_planes = 10;
  int sign_change_lines = 100;
  int local_zero_weights = 24;  ///< local weights tested individually
  int local_zero_points = 5;    ///< offsets per tested local weight
  int delta0_recheck = 10000;
  int radial_samples = 100000;
  int sample_points = 2001;     ///< rows of the sample CSV
};

struct RunConfig {
  int k_max = 8;
  std::uint64_t seed = 20170901;
  int workers = 1;
  std::string output_dir = "wradon-out";
  std::string profile;  ///< prebuilt profile; empty means build in-process
  double zero_tol = 1e-6;          ///< zero checks: |R_W f| <= zero_tol * max |G|
  double oracle_tol = 1e-6;        ///< relative tolerance of 1-D vs 2-D comparisons
  double positivity_floor = 0.5 - 1e-9;
  bool negative_control = true;
  QuadratureConfig quad;
  CoverOptions cover;
  GridConfig grids;
};

namespace detail {

template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("config: top level must be an object");
  static const char* known[] = {"k_max",    "seed",      "workers", "output_dir", "profile",
                                "zero_tol", "oracle_tol", "positivity_floor", "negative_control",
                                "quadrature", "cover",   "grids"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw FormatError("config: unknown key '" + key + "'");
  }
  RunConfig c;
  using detail::read_opt;
  read_opt(j, "k_max", c.k_max);
  read_opt(j, "seed", c.seed);
  read_opt(j, "workers", c.workers);
  read_opt(j, "output_dir", c.output_dir);
  read_opt(j, "profile", c.profile);
  read_opt(j, "zero_tol", c.zero_tol);
  read_opt(j, "oracle_tol", c.oracle_tol);
  read_opt(j, "positivity_floor", c.positivity_floor);
  read_opt(j, "negative_control", c.negative_control);
  if (j.contains("quadrature")) {
    const auto& q = j.at("quadrature");
    read_opt(q, "target_rel_tol", c.quad.target_rel_tol);
    read_opt(q, "oracle_rel_tol", c.quad.oracle_rel_tol);
    read_opt(q, "max_evals", c.quad.max_evals);
    read_opt(q, "points_per_oscillation", c.quad.points_per_oscillation);
    read_opt(q, "gauss_order", c.quad.gauss_order);
    read_opt(q, "mc_samples", c.quad.mc_samples);
    read_opt(q, "interpolate_profiles", c.quad.interpolate_profiles);
    read_opt(q, "angular_points", c.quad.angular_points);
  }
  if (j.contains("cover")) {
    const auto& v = j.at("cover");
    read_opt(v, "n_max", c.cover.n_max);
    read_opt(v, "eps_start", c.cover.local.eps_start);
    read_opt(v, "eps_min", c.cover.local.eps_min);
    read_opt(v, "denominator_floor", c.cover.local.denominator_floor);
    read_opt(v, "ratio_cap", c.cover.local.ratio_cap);
    read_opt(v, "max_lobes", c.cover.local.max_lobes);
    read_opt(v, "candidates", c.cover.local.candidates);
    read_opt(v, "phi_level", c.cover.local.phi_level);
  }
  if (j.contains("grids")) {
    const auto& g = j.at("grids");
    read_opt(g, "psi_points", c.grids.psi_points);
    read_opt(g, "xi_points", c.grids.xi_points);
    read_opt(g, "w0_zero_points", c.grids.w0_zero_points);
    read_opt(g, "zero_points", c.grids.zero_points);
    read_opt(g, "positivity_samples", c.grids.positivity_samples);
    read_opt(g, "decay_points", c.grids.decay_points);
    read_opt(g, "bound_points", c.grids.bound_points);
    read_opt(g, "oracle_cases", c.grids.oracle_cases);
    read_opt(g, "higher_dim_planes", c.grids.higher_dim_planes);
    read_opt(g, "sign_change_lines", c.grids.sign_change_lines);
    read_opt(g, "local_zero_weights", c.grids.local_zero_weights);
    read_opt(g, "local_zero_points", c.grids.local_zero_points);
    read_opt(g, "delta0_recheck", c.grids.delta0_recheck);
    read_opt(g, "radial_samples", c.grids.radial_samples);
    read_opt(g, "sample_points", c.grids.sample_points);
  }
  c.quad.rng_seed = c.seed;
  c.quad.validate();
  if (c.k_max < 1 || c.k_max > 12) throw FormatError("config: k_max must be in [1, 12]");
  if (c.workers < 1) throw FormatError("config: workers must be >= 1");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config: " + std::string(e.what()));
  }
  return config_from_json(j);
}

}  // namespace wradon
