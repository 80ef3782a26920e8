#pragma once

#include <array>
#include <cmath>
#include <random>

#include "hd2d/errors.hpp"
#include "hd2d/rng.hpp"
#include "hd2d/units.hpp"

namespace hd2d {

struct BandParams {
  double carrier_frequency = 28e9;  // Hz
  double bandwidth = 1e9;           // Hz
  double alpha_los = 2.0;
  double alpha_nlos = 5.0;  // unused by the analysis; Monte Carlo may enable NLOS terms
  double noise_power = 0.0;  // W

  void validate() const {
    require(carrier_frequency > 0.0, "carrier frequency must be positive");
    require(bandwidth > 0.0, "bandwidth must be positive");
    require(alpha_los >= 2.0 && alpha_nlos >= 2.0, "path-loss exponents must be >= 2");
    require(noise_power > 0.0, "noise power must be positive");
  }
};

/// Two-level sectored pattern: gain g_m inside a mainlobe of width theta, g_s elsewhere.
struct AntennaPattern {
  double mainlobe_gain = 10.0;  // linear
  double sidelobe_gain = 0.1;   // linear
  double beamwidth = kPi / 6.0;  // rad

  void validate() const {
    require(mainlobe_gain > sidelobe_gain && sidelobe_gain > 0.0, "antenna gains need g_m > g_s > 0");
    require(beamwidth > 0.0 && beamwidth <= kTwoPi, "beamwidth must lie in (0, 2*pi]");
  }
};

/// Effective transmit-receive gain towards a randomly oriented interferer.
struct GainDistribution {
  std::array<double, 3> gains{};          // G1 >= G2 >= G3
  std::array<double, 3> probabilities{};  // sum to one
};

/// Free-space constant (wavelength / 4 pi)^2.
inline double pathloss_constant(double frequency) {
  require(frequency > 0.0, "frequency must be positive");
  const double k = kSpeedOfLight / (4.0 * kPi * frequency);
  return k * k;
}

inline double path_loss(double d, double alpha, double c) {
  require(d > 0.0, "path loss is singular at d = 0");
  return c * std::pow(d, -alpha);
}

/// Thermal noise -174 dBm/Hz over `bandwidth` plus a noise figure, in watts.
inline double noise_power(double bandwidth, double noise_figure_db = 10.0) {
  require(bandwidth > 0.0, "bandwidth must be positive");
  return dbm_to_watts(-174.0 + 10.0 * std::log10(bandwidth) + noise_figure_db);
}

inline GainDistribution gain_distribution(const AntennaPattern& pat) {
  pat.validate();
  const double p = std::min(pat.beamwidth / kTwoPi, 1.0);
  const double gm = pat.mainlobe_gain, gs = pat.sidelobe_gain;
  return {{gm * gm, gm * gs, gs * gs}, {p * p, 2.0 * p * (1.0 - p), (1.0 - p) * (1.0 - p)}};
}

/// Rayleigh fading power gain, Exp(1).
inline double sample_rayleigh_gain(Rng& rng) { return std::exponential_distribution<double>(1.0)(rng); }

}  // namespace hd2d
