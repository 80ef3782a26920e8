#pragma once

#include <optional>
#include <string>

#include "hd2d/errors.hpp"
#include "hd2d/geometry.hpp"
#include "hd2d/propagation.hpp"
#include "hd2d/quadrature.hpp"
#include "hd2d/units.hpp"

namespace hd2d {

/// Every physical input of the hybrid mmW/uW D2D model, in I/O units. Defaults are the
/// reference simulation values (0 dBm devices, 37 dBm base stations, 28/2 GHz, ...).
struct SystemParams {
  double dt_power_dbm = 0.0;
  double bs_power_dbm = 37.0;
  double mainlobe_gain_dbi = 10.0;
  double sidelobe_gain_dbi = -10.0;
  double beamwidth_deg = 30.0;
  double bs_density_per_km2 = 1.0;
  double cu_density_per_km2 = 5.0;
  double dt_density_per_km2 = 50.0;
  double alpha_uw = 4.0;
  double alpha_los = 2.0;
  double alpha_nlos = 5.0;
  double tau_dbm = -85.0;
  double bandwidth_uw_hz = 0.1e9;
  double bandwidth_mm_hz = 1e9;
  double frequency_uw_hz = 2e9;
  double frequency_mm_hz = 28e9;
  double noise_figure_db = 10.0;

  double beta_per_m = 0.0053;
  double d0_m = 50.0;
  double aloha_access = 1.0;
  int channels = 8;
  std::optional<double> pkd_override;
  // Threshold-region radius as written, (P_B h / tau)^(1/alpha), omits the path-loss constant.
  bool threshold_includes_pathloss_constant = false;
  LaplaceMethod uw_dt_laplace = LaplaceMethod::Quadrature;
  // Rate = B log2(1 + SINR) in bits/s; false uses the natural log (nats/s).
  bool rate_in_bits = true;

  double dt_power_w() const { return dbm_to_watts(dt_power_dbm); }
  double bs_power_w() const { return dbm_to_watts(bs_power_dbm); }
  double tau_w() const { return dbm_to_watts(tau_dbm); }
  double dt_density() const { return per_km2_to_per_m2(dt_density_per_km2); }
  double bs_density() const { return per_km2_to_per_m2(bs_density_per_km2); }
  double cu_density() const { return per_km2_to_per_m2(cu_density_per_km2); }

  AntennaPattern pattern() const {
    return {db_to_linear(mainlobe_gain_dbi), db_to_linear(sidelobe_gain_dbi), deg_to_rad(beamwidth_deg)};
  }

  BandParams mmw_band() const {
    return {frequency_mm_hz, bandwidth_mm_hz, alpha_los, alpha_nlos, noise_power(bandwidth_mm_hz, noise_figure_db)};
  }

  BandParams uw_band() const {
    return {frequency_uw_hz, bandwidth_uw_hz, alpha_uw, alpha_uw, noise_power(bandwidth_uw_hz, noise_figure_db)};
  }

  /// Throws InvalidArgument naming the offending field.
  void validate() const {
    auto need = [](bool ok, const char* field, const char* what) {
      if (!ok) throw InvalidArgument(std::string(field) + ": " + what);
    };
    need(std::isfinite(dt_power_dbm), "dt_power_dbm", "must be finite");
    need(std::isfinite(bs_power_dbm), "bs_power_dbm", "must be finite");
    need(mainlobe_gain_dbi > sidelobe_gain_dbi, "mainlobe_gain_dbi", "must exceed sidelobe_gain_dbi");
    need(beamwidth_deg > 0.0 && beamwidth_deg <= 360.0, "beamwidth_deg", "must lie in (0, 360]");
    need(bs_density_per_km2 >= 0.0, "bs_density_per_km2", "must be non-negative");
    need(cu_density_per_km2 >= 0.0, "cu_density_per_km2", "must be non-negative");
    need(dt_density_per_km2 >= 0.0, "dt_density_per_km2", "must be non-negative");
    need(alpha_uw > 2.0, "alpha_uw", "must exceed 2");
    need(alpha_los >= 2.0, "alpha_los", "must be >= 2");
    need(alpha_nlos >= 2.0, "alpha_nlos", "must be >= 2");
    need(std::isfinite(tau_dbm), "tau_dbm", "must be a finite power (0 W has no dBm value)");
    need(bandwidth_uw_hz > 0.0, "bandwidth_uw_hz", "must be positive");
    need(bandwidth_mm_hz > 0.0, "bandwidth_mm_hz", "must be positive");
    need(frequency_uw_hz > 0.0, "frequency_uw_hz", "must be positive");
    need(frequency_mm_hz > 0.0, "frequency_mm_hz", "must be positive");
    need(beta_per_m >= 0.0, "beta_per_m", "must be non-negative");
    need(d0_m > 0.0, "d0_m", "must be positive");
    need(aloha_access >= 0.0 && aloha_access <= 1.0, "aloha_access", "must lie in [0, 1]");
    need(channels >= 1, "channels", "must be >= 1");
    if (pkd_override) need(*pkd_override >= 0.0 && *pkd_override <= 1.0, "pkd", "must lie in [0, 1]");
  }
};

}  // namespace hd2d
