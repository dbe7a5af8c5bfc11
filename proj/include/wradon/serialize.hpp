#pragma once

// Profile files: everything needed to rebuild an AssembledWeight without
// re-running the cover construction. Layout (JSON, field by field in
// docs/profile-format.md):
//
//   { "format": "wradon-profile", "version": 1,
//     "k_max", "bump", "quadrature", "psi_shift", "delta0",
//     "locals": [ { "s0", "eps", "psi1", "shell", "sign", "r_star",
//                   "m0_s0", "n0_s0", "m0_vanishes" }, ... ] }
//
// Shell integrals are recomputed on load; doubles are written with
// round-trip precision, so a save/load cycle reproduces the weight exactly.

#include <fstream>
#include <memory>
#include <string>

#include "json.hpp"
#include "wradon/errors.hpp"
#include "wradon/local.hpp"
#include "wradon/model.hpp"
#include "wradon/w0.hpp"

namespace wradon {

inline constexpr const char* profile_format = "wradon-profile";
inline constexpr int profile_version = 1;

inline nlohmann::json to_json(const BumpSpec& b) {
  return {{"rise_start", b.rise_start}, {"rise_end", b.rise_end}, {"fall_start", b.fall_start}, {"fall_end", b.fall_end}};
}

inline BumpSpec bump_from_json(const nlohmann::json& j) {
  return BumpSpec(j.at("rise_start").get<double>(), j.at("rise_end").get<double>(), j.at("fall_start").get<double>(),
                  j.at("fall_end").get<double>());
}

inline nlohmann::json to_json(const QuadratureConfig& q) {
  return {{"target_rel_tol", q.target_rel_tol},
          {"oracle_rel_tol", q.oracle_rel_tol},
          {"max_evals", q.max_evals},
          {"points_per_oscillation", q.points_per_oscillation},
          {"gauss_order", q.gauss_order},
          {"mc_samples", q.mc_samples},
          {"rng_seed", q.rng_seed},
          {"interpolate_profiles", q.interpolate_profiles},
          {"angular_points", q.angular_points}};
}

inline QuadratureConfig quadrature_from_json(const nlohmann::json& j) {
  QuadratureConfig q;
  q.target_rel_tol = j.at("target_rel_tol").get<double>();
  q.oracle_rel_tol = j.at("oracle_rel_tol").get<double>();
  q.max_evals = j.at("max_evals").get<std::int64_t>();
  q.points_per_oscillation = j.at("points_per_oscillation").get<int>();
  q.gauss_order = j.at("gauss_order").get<int>();
  q.mc_samples = j.at("mc_samples").get<int>();
  q.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  q.interpolate_profiles = j.at("interpolate_profiles").get<bool>();
  q.angular_points = j.at("angular_points").get<int>();
  q.validate();
  return q;
}

inline nlohmann::json to_json(const LocalWeight& w) {
  return {{"s0", w.s0},       {"eps", w.eps},     {"psi1", to_json(w.psi1)}, {"shell", w.shell},
          {"sign", w.sign},   {"r_star", w.r_star}, {"m0_s0", w.m0_s0},     {"n0_s0", w.n0_s0},
          {"m0_vanishes", w.m0_vanishes}};
}

inline LocalWeight local_from_json(const nlohmann::json& j) {
  LocalWeight w;
  w.s0 = j.at("s0").get<double>();
  w.eps = j.at("eps").get<double>();
  w.psi1 = bump_from_json(j.at("psi1"));
  w.shell = j.at("shell").get<int>();
  w.sign = j.at("sign").get<int>();
  w.r_star = j.at("r_star").get<double>();
  w.m0_s0 = j.at("m0_s0").get<double>();
  w.n0_s0 = j.at("n0_s0").get<double>();
  w.m0_vanishes = j.at("m0_vanishes").get<bool>();
  if (!(w.eps > 0.0) || !(w.s0 >= 0.0) || (w.sign != 1 && w.sign != -1)) throw FormatError("profile: bad local weight");
  return w;
}

inline nlohmann::json profile_to_json(const AssembledWeight& w) {
  nlohmann::json locals = nlohmann::json::array();
  for (const auto& l : w.cover().locals()) locals.push_back(to_json(l));
  const Model& m = w.model();
  return {{"format", profile_format},
          {"version", profile_version},
          {"k_max", m.k_max()},
          {"bump", to_json(m.profile().bump)},
          {"quadrature", to_json(m.quad())},
          {"psi_shift", w.w0().psi_shift()},
          {"delta0", w.cover().delta0()},
          {"locals", std::move(locals)}};
}

inline AssembledWeight profile_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != profile_format) throw FormatError("profile: wrong format tag");
    if (j.at("version").get<int>() != profile_version) throw FormatError("profile: unsupported version");
    const RadialProfile prof(bump_from_json(j.at("bump")), j.at("k_max").get<int>());
    auto model = make_model(prof, quadrature_from_json(j.at("quadrature")));
    auto w0 = std::make_shared<const W0Profile>(model, j.at("psi_shift").get<int>());
    std::vector<LocalWeight> locals;
    for (const auto& l : j.at("locals")) locals.push_back(local_from_json(l));
    return AssembledWeight(w0, CoverPartition(std::move(locals), j.at("delta0").get<double>()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("profile: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("profile: ") + e.what());
  }
}

inline void save_profile(const AssembledWeight& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("profile: cannot write " + path);
  out << profile_to_json(w).dump(1) << '\n';
}

inline AssembledWeight load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("profile: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("profile: ") + e.what());
  }
  return profile_from_json(j);
}

}  // namespace wradon
