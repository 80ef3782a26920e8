#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hd2d/aoa.hpp"
#include "hd2d/curve.hpp"
#include "hd2d/simulator.hpp"
#include "hd2d/system_params.hpp"

#ifndef HD2D_GIT_DESCRIBE
#define HD2D_GIT_DESCRIBE "unknown"
#endif

namespace hd2d {

inline std::string_view git_describe() { return HD2D_GIT_DESCRIBE; }

inline std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string_view to_string(LosModel m) { return m == LosModel::Bernoulli ? "bernoulli" : "geometric"; }
inline std::string_view to_string(SensingModel m) { return m == SensingModel::MeanRadius ? "mean_radius" : "per_realization"; }
inline std::string_view to_string(DeferralPolicy d) { return d == DeferralPolicy::Outage ? "outage" : "condition_on_access"; }

// Keys mirror the config file so that a manifest parses back as a config.
inline nlohmann::json system_to_json(const SystemParams& p) {
  nlohmann::json j = {
      {"dt_power_dbm", p.dt_power_dbm},
      {"bs_power_dbm", p.bs_power_dbm},
      {"mainlobe_gain_dbi", p.mainlobe_gain_dbi},
      {"sidelobe_gain_dbi", p.sidelobe_gain_dbi},
      {"beamwidth_deg", p.beamwidth_deg},
      {"bs_density_per_km2", p.bs_density_per_km2},
      {"cu_density_per_km2", p.cu_density_per_km2},
      {"dt_density_per_km2", p.dt_density_per_km2},
      {"alpha_uw", p.alpha_uw},
      {"alpha_los", p.alpha_los},
      {"alpha_nlos", p.alpha_nlos},
      {"tau_dbm", p.tau_dbm},
      {"bandwidth_uw_hz", p.bandwidth_uw_hz},
      {"bandwidth_mm_hz", p.bandwidth_mm_hz},
      {"frequency_uw_hz", p.frequency_uw_hz},
      {"frequency_mm_hz", p.frequency_mm_hz},
      {"noise_figure_db", p.noise_figure_db},
      {"beta_per_m", p.beta_per_m},
      {"d0_m", p.d0_m},
      {"aloha_access", p.aloha_access},
      {"channels", p.channels},
      {"threshold_includes_pathloss_constant", p.threshold_includes_pathloss_constant},
      {"uw_dt_laplace", std::string(to_string(p.uw_dt_laplace))},
      {"rate_in_bits", p.rate_in_bits},
  };
  if (p.pkd_override) j["pkd"] = *p.pkd_override;
  return j;
}

inline nlohmann::json simulation_to_json(const SimConfig& c) {
  return {
      {"iterations", c.iterations},
      {"window_half_width_m", c.window_half_width},
      {"los_model", std::string(to_string(c.los))},
      {"sensing", std::string(to_string(c.sensing))},
      {"deferral", std::string(to_string(c.deferral))},
      {"nlos_interference", c.nlos_interference},
      {"blockage_length_m", {c.blockage_length.min, c.blockage_length.max}},
      {"blockage_width_m", {c.blockage_width.min, c.blockage_width.max}},
      {"local_blockage_half_width_m", c.local_blockage_half_width},
  };
}

inline nlohmann::json mechanism_to_json(const MechanismParams& m) {
  return {
      {"window", m.window},
      {"tolerance_deg", rad_to_deg(m.tolerance)},
      {"jitter_sigma_m", m.jitter_sigma},
      {"reflection_loss_db", linear_to_db(m.spectrum.reflection_loss)},
      {"peak_floor_dbm", watts_to_dbm(m.spectrum.peak_floor)},
      {"resolution_deg", rad_to_deg(m.spectrum.resolution)},
      {"reflections", m.spectrum.reflections == ReflectionModel::Specular ? "specular" : "diffuse"},
  };
}

/// Canonical text of a manifest (sorted keys, shortest round-trip doubles) and its hash.
struct Manifest {
  nlohmann::json body;
  std::string text() const { return body.dump(2) + "\n"; }
  std::string hash() const { return fnv1a64_hex(body.dump()); }
};

}  // namespace hd2d
