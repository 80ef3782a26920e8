#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hd2d/analysis_mmw.hpp"
#include "hd2d/errors.hpp"
#include "hd2d/propagation.hpp"
#include "hd2d/quadrature.hpp"
#include "hd2d/rng.hpp"
#include "hd2d/system_params.hpp"
#include "hd2d/units.hpp"

namespace hd2d {

/// Test link in the uW band, underlaid on the downlink channel k_d with cognitive sensing.
struct UwScenario {
  double dt_power = 1e-3;  // W
  double bs_power = 5.0;   // W
  BandParams band;
  double dt_density = 50e-6;
  double bs_density = 1e-6;
  double cu_density = 5e-6;
  int channels = 8;
  double tau = 3.16e-12;  // W
  double d0 = 50.0;
  double gamma = 1.0;
  double pkd = 0.2;
  bool threshold_includes_pathloss_constant = false;
  LaplaceMethod dt_laplace = LaplaceMethod::Quadrature;

  void validate() const {
    band.validate();
    require(dt_power > 0.0 && bs_power > 0.0, "transmit powers must be positive");
    require(dt_density >= 0.0 && bs_density >= 0.0 && cu_density >= 0.0, "densities must be non-negative");
    require(channels >= 1, "channel count must be >= 1");
    require(tau > 0.0, "sensing threshold must be positive");
    require(d0 > 0.0, "d0 must be positive");
    require(gamma >= 0.0, "SINR threshold must be non-negative");
    require(pkd >= 0.0 && pkd <= 1.0, "p_kd must lie in [0, 1]");
  }

  double alpha() const { return band.alpha_los; }
  double delta() const { return 1.0 / alpha(); }
  double pathloss_c() const { return pathloss_constant(band.carrier_frequency); }
  /// gamma d0^alpha / (C P_D)
  double epsilon() const { return gamma * std::pow(d0, alpha()) / (pathloss_c() * dt_power); }
  double epsilon_dt() const { return pathloss_c() * dt_power * epsilon(); }
  double epsilon_bs() const { return pathloss_c() * bs_power * epsilon(); }
};

inline UwScenario make_uw_scenario(const SystemParams& p, double gamma, double pkd) {
  UwScenario sc;
  sc.dt_power = p.dt_power_w();
  sc.bs_power = p.bs_power_w();
  sc.band = p.uw_band();
  sc.dt_density = p.dt_density();
  sc.bs_density = p.bs_density();
  sc.cu_density = p.cu_density();
  sc.channels = p.channels;
  sc.tau = p.tau_w();
  sc.d0 = p.d0_m;
  sc.gamma = gamma;
  sc.pkd = pkd;
  sc.threshold_includes_pathloss_constant = p.threshold_includes_pathloss_constant;
  sc.dt_laplace = p.uw_dt_laplace;
  return sc;
}

/// Monte Carlo estimate of P[N >= K], N the number of cellular users in the typical BS
/// cell under nearest-BS association. Cells are drawn on a periodic square so every BS
/// is interior. k_d is only occupied once the other K-1 channels are taken.
inline double estimate_pkd(double bs_density, double cu_density, int channels, Rng& rng, std::size_t n_cells = 20'000) {
  require(bs_density >= 0.0 && cu_density >= 0.0, "densities must be non-negative");
  require(channels >= 1, "channel count must be >= 1");
  require(n_cells >= 1, "need at least one cell");
  if (cu_density == 0.0 || bs_density == 0.0) return 0.0;

  const std::size_t per_batch = std::min<std::size_t>(n_cells, 4000);
  const double side = std::sqrt(static_cast<double>(per_batch) / bs_density);
  const int grid = std::max(1, static_cast<int>(side * std::sqrt(bs_density)));
  const double cell = side / grid;

  std::size_t total = 0, busy = 0;
  while (total < n_cells) {
    std::uniform_real_distribution<double> u(0.0, side);
    const auto nb = std::poisson_distribution<std::int64_t>(bs_density * side * side)(rng);
    const auto nc = std::poisson_distribution<std::int64_t>(cu_density * side * side)(rng);
    if (nb == 0) continue;
    std::vector<double> bx(static_cast<std::size_t>(nb)), by(static_cast<std::size_t>(nb));
    std::vector<std::vector<std::uint32_t>> buckets(static_cast<std::size_t>(grid) * grid);
    auto cell_of = [&](double v) { return std::min(grid - 1, static_cast<int>(v / cell)); };
    for (std::size_t i = 0; i < bx.size(); ++i) {
      bx[i] = u(rng);
      by[i] = u(rng);
      buckets[static_cast<std::size_t>(cell_of(bx[i]) * grid + cell_of(by[i]))].push_back(static_cast<std::uint32_t>(i));
    }
    auto wrap_d2 = [&](double x0, double y0, double x1, double y1) {
      double dx = std::fabs(x0 - x1), dy = std::fabs(y0 - y1);
      dx = std::min(dx, side - dx);
      dy = std::min(dy, side - dy);
      return dx * dx + dy * dy;
    };
    std::vector<std::uint32_t> load(bx.size(), 0);
    for (std::int64_t c = 0; c < nc; ++c) {
      const double x = u(rng), y = u(rng);
      const int cx = cell_of(x), cy = cell_of(y);
      double best = std::numeric_limits<double>::max();
      std::uint32_t arg = 0;
      for (int ring = 0;; ++ring) {
        // Everything in ring r+1 or beyond is at least r cells away.
        if (ring > 0 && static_cast<double>(ring - 1) * cell * static_cast<double>(ring - 1) * cell >= best) break;
        if (2 * ring - 1 > grid) break;
        for (int dx = -ring; dx <= ring; ++dx)
          for (int dy = -ring; dy <= ring; ++dy) {
            if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
            const int gx = ((cx + dx) % grid + grid) % grid, gy = ((cy + dy) % grid + grid) % grid;
            for (auto b : buckets[static_cast<std::size_t>(gx * grid + gy)]) {
              const double d2 = wrap_d2(x, y, bx[b], by[b]);
              if (d2 < best || (d2 == best && b < arg)) {
                best = d2;
                arg = b;
              }
            }
          }
      }
      ++load[arg];
    }
    for (auto l : load) busy += l >= static_cast<std::uint32_t>(channels) ? 1 : 0;
    total += load.size();
  }
  return static_cast<double>(busy) / static_cast<double>(total);
}

/// Mean radius of the sensing exclusion disc: (P_B / tau)^(1/alpha) * Gamma(1 + 1/alpha).
/// Pass the path-loss constant through `p_b` to include it.
inline double mean_threshold_radius(double p_b, double tau, double alpha) {
  require(tau > 0.0, "sensing threshold must be positive");
  require(p_b > 0.0 && alpha > 0.0, "BS power and path-loss exponent must be positive");
  const double delta = 1.0 / alpha;
  return std::pow(p_b / tau, delta) * std::tgamma(1.0 + delta);
}

/// Probability that no k_d-active BS lies inside the mean threshold region.
inline double availability(double bs_density, double pkd, double radius) {
  require(bs_density >= 0.0 && pkd >= 0.0 && radius >= 0.0, "availability inputs must be non-negative");
  return std::exp(-bs_density * pkd * kPi * radius * radius);
}

inline double threshold_radius(const UwScenario& sc) {
  const double pb = sc.threshold_includes_pathloss_constant ? sc.bs_power * sc.pathloss_c() : sc.bs_power;
  return mean_threshold_radius(pb, sc.tau, sc.alpha());
}

/// PGFL of a Rayleigh-faded PPP of given density on the annulus [r_in, r_max]:
/// exp(-int 2 pi r density * x / (r^a + x) dr).
inline LaplaceEvaluation pgfl_annulus(double density, double x, double alpha, double r_in, double r_max,
                                      const QuadratureOptions& opt = {}) {
  if (density == 0.0 || x == 0.0 || r_in >= r_max) return {1.0, LaplaceMethod::Quadrature, 0.0, 0.0};
  auto f = [&](double r) {
    if (r <= 0.0) return 0.0;
    return -x / (std::pow(r, alpha) + x) * kTwoPi * r * density;
  };
  const double knee = std::pow(x, 1.0 / alpha);
  const auto q = integrate_piecewise(f, r_in, r_max, {0.1 * knee, knee, 10.0 * knee, 100.0 * knee}, opt);
  const double v = std::exp(q.value);
  return {v, LaplaceMethod::Quadrature, v * q.abs_error, 0.0};
}

/// Laplace transform of the DT interference at the scenario's epsilon, for a DT field of
/// density p_a * lambda_DT. ClosedForm evaluates the printed expression verbatim
/// (exponent eps_DT^delta); Quadrature integrates the PGFL.
inline LaplaceEvaluation laplace_uw_dt(const UwScenario& sc, double pa, LaplaceMethod method) {
  sc.validate();
  require(pa >= 0.0 && pa <= 1.0, "availability must lie in [0, 1]");
  const double x = sc.epsilon_dt();
  const double density = pa * sc.dt_density;
  if (method == LaplaceMethod::ClosedForm) {
    const double delta = sc.delta();
    const double s = std::sin(kTwoPi * delta);
    if (std::fabs(s) < 1e-12) throw InvalidArgument("sin(2 pi delta) = 0: use the quadrature path");
    if (x == 0.0 || density == 0.0) return {1.0, LaplaceMethod::ClosedForm, 0.0, 0.0};
    return {std::exp(-2.0 * density * std::pow(x, delta) * kPi * kPi * delta / s), LaplaceMethod::ClosedForm, 0.0, 0.0};
  }
  require(method == LaplaceMethod::Quadrature, "unsupported Laplace method");
  return pgfl_annulus(density, x, sc.alpha(), 0.0, radial_cutoff(0.0));
}

/// Laplace transform of the BS interference from k_d-active BSs outside `radius`.
/// ClosedForm is the arctangent expression and requires alpha = 4.
inline LaplaceEvaluation laplace_uw_bs(const UwScenario& sc, double pkd, double radius, LaplaceMethod method) {
  sc.validate();
  require(pkd >= 0.0 && pkd <= 1.0, "p_kd must lie in [0, 1]");
  require(radius >= 0.0, "threshold radius must be non-negative");
  const double eb = sc.epsilon_bs();
  const double density = pkd * sc.bs_density;
  if (method == LaplaceMethod::ClosedForm) {
    if (sc.alpha() != 4.0) throw InvalidArgument("closed-form BS Laplace transform needs alpha = 4; use quadrature");
    if (eb == 0.0 || density == 0.0) return {1.0, LaplaceMethod::ClosedForm, 0.0, 0.0};
    const double r4 = std::pow(radius, 4.0);
    const double theta = radius > 0.0 ? std::sqrt(eb / r4) : std::numeric_limits<double>::infinity();
    const double atan_inv = std::isinf(theta) ? 0.0 : std::atan(1.0 / theta);
    const double frac = std::isinf(theta) ? 0.0 : theta / (theta * theta + 1.0);
    const double expo = -kPi * density * std::sqrt(eb) * (kPi / 2.0 - atan_inv + frac) +
                        density * kPi * eb * radius * radius / (eb + r4);
    return {std::exp(expo), LaplaceMethod::ClosedForm, 0.0, 0.0};
  }
  require(method == LaplaceMethod::Quadrature, "unsupported Laplace method");
  return pgfl_annulus(density, eb, sc.alpha(), radius, std::max(radial_cutoff(0.0), 10.0 * radius));
}

struct UwBreakdown {
  double threshold_radius = 0.0;
  double availability = 1.0;
  double noise_term = 1.0;
  LaplaceEvaluation dt;
  LaplaceEvaluation bs;
  double coverage = 1.0;
};

inline UwBreakdown coverage_uw_breakdown(const UwScenario& sc) {
  sc.validate();
  UwBreakdown b;
  b.threshold_radius = threshold_radius(sc);
  b.availability = availability(sc.bs_density, sc.pkd, b.threshold_radius);
  b.noise_term = std::exp(-sc.epsilon() * sc.band.noise_power);
  b.dt = laplace_uw_dt(sc, b.availability, sc.dt_laplace);
  b.bs = laplace_uw_bs(sc, sc.pkd, b.threshold_radius,
                       sc.alpha() == 4.0 ? LaplaceMethod::ClosedForm : LaplaceMethod::Quadrature);
  b.coverage = b.noise_term * b.dt.value * b.bs.value;
  return b;
}

/// uW SINR coverage given channel access: exp(-eps sigma^2) L_DT(eps) L_BS(eps).
inline double coverage_uw(const UwScenario& sc) { return coverage_uw_breakdown(sc).coverage; }

}  // namespace hd2d
