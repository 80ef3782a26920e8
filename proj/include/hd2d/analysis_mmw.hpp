#pragma once

#include <cmath>
#include <vector>

#include "hd2d/errors.hpp"
#include "hd2d/propagation.hpp"
#include "hd2d/quadrature.hpp"
#include "hd2d/system_params.hpp"
#include "hd2d/units.hpp"

namespace hd2d {

/// Test link in the mmW band: LOS-only interferers from an Aloha-thinned DT field with
/// sectored antennas, perfect beam alignment on the test link.
struct MmwScenario {
  double dt_power = 1e-3;  // W
  AntennaPattern pattern;
  BandParams band;
  double dt_density = 50e-6;  // per m^2
  double aloha_access = 1.0;
  double beta = 0.0053;  // per m
  double d0 = 50.0;      // m
  double gamma = 1.0;    // linear SINR threshold

  void validate() const {
    pattern.validate();
    band.validate();
    require(dt_power > 0.0, "DT power must be positive");
    require(dt_density >= 0.0, "DT density must be non-negative");
    require(aloha_access >= 0.0 && aloha_access <= 1.0, "Aloha access probability must lie in [0, 1]");
    require(beta >= 0.0, "beta must be non-negative");
    require(d0 > 0.0, "d0 must be positive");
    require(gamma >= 0.0, "SINR threshold must be non-negative");
  }

  double pathloss_c() const { return pathloss_constant(band.carrier_frequency); }

  /// gamma * d0^alpha_L / (P_D g_m^2 C): the Laplace argument that turns coverage into L(s).
  double epsilon_l() const {
    const double gm = pattern.mainlobe_gain;
    return gamma * std::pow(d0, band.alpha_los) / (dt_power * gm * gm * pathloss_c());
  }
};

inline MmwScenario make_mmw_scenario(const SystemParams& p, double gamma) {
  return {p.dt_power_w(), p.pattern(), p.mmw_band(), p.dt_density(), p.aloha_access, p.beta_per_m, p.d0_m, gamma};
}

/// Upper limit used for every radial PGFL integral.
inline double radial_cutoff(double beta) { return beta > 0.0 ? std::max(40.0 / beta, 20'000.0) : 20'000.0; }

/// Laplace transform of the aggregate LOS mmW interference at argument s, by adaptive
/// quadrature of the three gain-class PGFL exponents.
inline LaplaceEvaluation laplace_mmw_interference(const MmwScenario& sc, double s, const QuadratureOptions& opt = {}) {
  sc.validate();
  require(s >= 0.0, "Laplace argument must be non-negative");
  if (s == 0.0 || sc.dt_density == 0.0 || sc.aloha_access == 0.0) return {1.0, LaplaceMethod::Quadrature, 0.0, 0.0};

  const auto gd = gain_distribution(sc.pattern);
  const double alpha = sc.band.alpha_los;
  const double r_max = radial_cutoff(sc.beta);
  double exponent = 0.0, err = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double density = sc.aloha_access * gd.probabilities[j] * sc.dt_density;
    if (density == 0.0) continue;
    const double k = s * sc.dt_power * sc.pathloss_c() * gd.gains[j];
    // (1 + k r^-a)^-1 - 1 = -k / (r^a + k); tends to -1 as r -> 0 so the integrand vanishes there.
    auto f = [&](double r) {
      if (r <= 0.0) return 0.0;
      return -k / (std::pow(r, alpha) + k) * kTwoPi * r * density * std::exp(-sc.beta * r);
    };
    const double knee = std::pow(k, 1.0 / alpha);
    std::vector<double> breaks{0.1 * knee, knee, 10.0 * knee, 100.0 * knee};
    if (sc.beta > 0.0) {
      breaks.push_back(1.0 / sc.beta);
      breaks.push_back(5.0 / sc.beta);
    }
    const auto q = integrate_piecewise(f, 0.0, r_max, breaks, opt);
    exponent += q.value;
    err += q.abs_error;
  }
  const double value = std::exp(exponent);
  return {value, LaplaceMethod::Quadrature, value * err, 0.0};
}

/// mmW SINR coverage. Conditional form assumes the test link is LOS; the unconditional
/// form multiplies by exp(-beta d0).
inline double coverage_mmw(const MmwScenario& sc, bool conditional_on_los, const QuadratureOptions& opt = {}) {
  sc.validate();
  const double eps = sc.epsilon_l();
  const double cond = std::exp(-eps * sc.band.noise_power) * laplace_mmw_interference(sc, eps, opt).value;
  return conditional_on_los ? cond : cond * los_probability(sc.d0, sc.beta);
}

}  // namespace hd2d
