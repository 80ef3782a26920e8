#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "hd2d/analysis_mmw.hpp"
#include "hd2d/analysis_uw.hpp"
#include "hd2d/curve.hpp"
#include "hd2d/errors.hpp"
#include "hd2d/rng.hpp"
#include "hd2d/system_params.hpp"

namespace hd2d {

inline constexpr std::uint64_t kPkdStream = 0x706b64;  // substream tag for the p_kd estimate

/// The configured override, or a Monte Carlo estimate seeded from `seed`.
inline double resolve_pkd(const SystemParams& p, std::uint64_t seed, std::size_t n_cells = 20'000) {
  if (p.pkd_override) return *p.pkd_override;
  Rng rng = substream(seed, 0, kPkdStream);
  return estimate_pkd(p.bs_density(), p.cu_density(), p.channels, rng, n_cells);
}

/// LOS-weighted mix of the conditional mmW coverage and the uW coverage.
inline double coverage_hybrid(const MmwScenario& mmw, const UwScenario& uw) {
  if (mmw.d0 != uw.d0) throw InvalidArgument("hybrid scenarios disagree on d0");
  const double plos = los_probability(mmw.d0, mmw.beta);
  const double mm = plos > 0.0 ? coverage_mmw(mmw, true) : 0.0;
  const double mu = plos < 1.0 ? coverage_uw(uw) : 0.0;
  return plos * mm + (1.0 - plos) * mu;
}

/// Single-band mmW is unconditional: a blocked test link is an outage.
inline double sinr_coverage(const SystemParams& p, double pkd, double gamma, Band band) {
  switch (band) {
    case Band::MmWave: return coverage_mmw(make_mmw_scenario(p, gamma), false);
    case Band::MicroWave: return coverage_uw(make_uw_scenario(p, gamma, pkd));
    case Band::Hybrid: return coverage_hybrid(make_mmw_scenario(p, gamma), make_uw_scenario(p, gamma, pkd));
  }
  return 0.0;
}

/// SINR needed for rate T over bandwidth B: 2^(T/B) - 1, or e^(T/B) - 1 for rates in nats.
inline double rate_to_sinr(double rate, double bandwidth_hz, bool in_bits = true) {
  return in_bits ? std::exp2(rate / bandwidth_hz) - 1.0 : std::expm1(rate / bandwidth_hz);
}

/// P[B log2(1 + SINR) >= T]. The hybrid variant applies each band's own bandwidth.
inline double rate_coverage(const SystemParams& p, double pkd, double rate_bps, Band band) {
  require(rate_bps >= 0.0, "rate must be non-negative");
  const double g_mm = rate_to_sinr(rate_bps, p.bandwidth_mm_hz, p.rate_in_bits);
  const double g_uw = rate_to_sinr(rate_bps, p.bandwidth_uw_hz, p.rate_in_bits);
  switch (band) {
    case Band::MmWave: return sinr_coverage(p, pkd, g_mm, Band::MmWave);
    case Band::MicroWave: return sinr_coverage(p, pkd, g_uw, Band::MicroWave);
    case Band::Hybrid: {
      auto uw = make_uw_scenario(p, g_uw, pkd);
      auto mm = make_mmw_scenario(p, g_mm);
      const double plos = los_probability(p.d0_m, p.beta_per_m);
      return plos * (plos > 0.0 ? coverage_mmw(mm, true) : 0.0) + (1.0 - plos) * (plos < 1.0 ? coverage_uw(uw) : 0.0);
    }
  }
  return 0.0;
}

/// Analytic curve over `grid`. For the distance axis every point uses `gamma_db`.
/// Per-point failures are recorded on the point and the sweep continues.
inline CoverageCurve sweep(Axis axis, std::span<const double> grid, const SystemParams& params, double pkd, Band band,
                           double gamma_db = 0.0) {
  require(!grid.empty(), "sweep grid must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i) require(grid[i] > grid[i - 1], "sweep grid must be strictly increasing");
  CoverageCurve curve{axis, CurveSource::Analytic, std::string(to_string(band)), {}};
  for (double x : grid) {
    CurvePoint pt{x, 0.0, 0.0, false, {}};
    try {
      switch (axis) {
        case Axis::SinrThresholdDb: pt.probability = sinr_coverage(params, pkd, db_to_linear(x), band); break;
        case Axis::DistanceM: {
          SystemParams q = params;
          q.d0_m = x;
          pt.probability = sinr_coverage(q, pkd, db_to_linear(gamma_db), band);
          break;
        }
        case Axis::RateBps: pt.probability = rate_coverage(params, pkd, x, band); break;
      }
    } catch (const Error& e) {
      pt.failed = true;
      pt.error = e.what();
    }
    curve.points.push_back(std::move(pt));
  }
  return curve;
}

}  // namespace hd2d
