#pragma once

#include <cmath>
#include <numbers>

namespace hd2d {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }
inline double per_km2_to_per_m2(double d) { return d * 1e-6; }
inline double per_m2_to_per_km2(double d) { return d * 1e6; }

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

/// Smallest absolute difference between two angles, in [0, pi].
inline double angular_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return d > kPi ? kTwoPi - d : d;
}

}  // namespace hd2d
