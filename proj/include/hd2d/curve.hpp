#pragma once

#include <cmath>
#include <ios>
#include <iomanip>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "hd2d/errors.hpp"

namespace hd2d {

enum class Axis { SinrThresholdDb, DistanceM, RateBps };
enum class CurveSource { Analytic, MonteCarlo };
enum class Band { MmWave, MicroWave, Hybrid };

inline std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::SinrThresholdDb: return "sinr_threshold_db";
    case Axis::DistanceM: return "distance_m";
    case Axis::RateBps: return "rate_bps";
  }
  return "?";
}

inline std::string_view to_string(CurveSource s) { return s == CurveSource::Analytic ? "analytic" : "monte_carlo"; }

inline std::string_view to_string(Band b) {
  switch (b) {
    case Band::MmWave: return "mmw";
    case Band::MicroWave: return "uw";
    case Band::Hybrid: return "hybrid";
  }
  return "?";
}

struct CurvePoint {
  double x = 0.0;
  double probability = 0.0;
  double ci_halfwidth = 0.0;  // Monte Carlo only
  bool failed = false;
  std::string error;
};

struct CoverageCurve {
  Axis axis = Axis::SinrThresholdDb;
  CurveSource source = CurveSource::Analytic;
  std::string mode;  // e.g. "hybrid", "mmw", "hybrid_oracle"
  std::vector<CurvePoint> points;

  bool has_failures() const {
    for (const auto& p : points)
      if (p.failed) return true;
    return false;
  }

  /// Probability at grid value x (exact match).
  double at(double x) const {
    for (const auto& p : points)
      if (p.x == x && !p.failed) return p.probability;
    throw InvalidArgument("no curve point at x = " + std::to_string(x));
  }
};

/// Writes `# manifest_sha` and `# axis` comment lines, the header
/// x,value,ci_halfwidth,source,mode, then one row per completed point.
inline void write_curve_csv(std::ostream& os, const CoverageCurve& curve, std::string_view manifest_hash) {
  os << "# manifest_sha: " << manifest_hash << '\n';
  os << "# axis: " << to_string(curve.axis) << '\n';
  os << "x,value,ci_halfwidth,source,mode\n";
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  for (const auto& p : curve.points) {
    if (p.failed) continue;
    os << p.x << ',' << p.probability << ',' << p.ci_halfwidth << ',' << to_string(curve.source) << ',' << curve.mode
       << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

/// 95 % Wilson score half-width for k successes out of n.
inline double wilson_halfwidth(std::size_t k, std::size_t n, double z = 1.959963984540054) {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  return z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
}

}  // namespace hd2d
