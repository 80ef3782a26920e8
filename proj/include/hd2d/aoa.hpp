#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <random>
#include <variant>
#include <vector>

#include "hd2d/errors.hpp"
#include "hd2d/geometry.hpp"
#include "hd2d/propagation.hpp"
#include "hd2d/rng.hpp"
#include "hd2d/system_params.hpp"
#include "hd2d/units.hpp"

namespace hd2d {

struct AoAPeak {
  double magnitude = 0.0;  // W
  double angle = 0.0;      // rad, [0, 2*pi)
};

struct AoASpectrum {
  std::vector<AoAPeak> peaks;

  std::size_t size() const { return peaks.size(); }
  bool empty() const { return peaks.empty(); }
};

/// Sliding window of the last W spectra observed from one peer. Single owner.
class PeerProfile {
 public:
  explicit PeerProfile(std::size_t window) : window_(window) { require(window >= 1, "profile window must be >= 1"); }

  void push(AoASpectrum s) {
    spectra_.push_back(std::move(s));
    while (spectra_.size() > window_) spectra_.pop_front();
  }

  std::size_t window() const { return window_; }
  std::size_t size() const { return spectra_.size(); }
  bool full() const { return spectra_.size() == window_; }
  const std::deque<AoASpectrum>& spectra() const { return spectra_; }

 private:
  std::size_t window_;
  std::deque<AoASpectrum> spectra_;
};

inline PeerProfile push_observation(PeerProfile profile, AoASpectrum spectrum) {
  profile.push(std::move(spectrum));
  return profile;
}

struct MmWave {
  double beam_angle = 0.0;  // rad
};
struct MicroWave {};
using BandDecision = std::variant<MmWave, MicroWave>;

inline bool is_mmwave(const BandDecision& d) { return std::holds_alternative<MmWave>(d); }

enum class ReflectionModel {
  Specular,  // mirror-image path off each face; deterministic
  Diffuse,   // one scattering point per face drawn uniformly each observation
};

struct SpectrumOptions {
  double tx_power = 1e-3;        // W, beacon power
  double pathloss_c = 1.424e-4;  // uW band constant
  double alpha = 4.0;
  double reflection_loss = 0.1;         // linear, -10 dB
  double peak_floor = 1e-15;            // W, -120 dBm
  double resolution = deg_to_rad(2.0);  // peaks closer than this merge
  ReflectionModel reflections = ReflectionModel::Specular;
  double max_path_length = 0.0;  // m; 0 derives it from the peak floor
};

inline SpectrumOptions spectrum_options(const SystemParams& p) {
  SpectrumOptions o;
  o.tx_power = p.dt_power_w();
  o.pathloss_c = pathloss_constant(p.frequency_uw_hz);
  o.alpha = p.alpha_uw;
  return o;
}

namespace detail {

inline double path_power(const SpectrumOptions& o, double length) { return o.tx_power * o.pathloss_c * std::pow(length, -o.alpha); }

inline double reflection_reach(const SpectrumOptions& o) {
  if (o.max_path_length > 0.0) return o.max_path_length;
  if (o.peak_floor <= 0.0) return 1000.0;
  return std::pow(o.tx_power * o.pathloss_c * o.reflection_loss / o.peak_floor, 1.0 / o.alpha);
}

/// Keeps the strongest peak of every group closer than `resolution`; output sorted by angle.
inline AoASpectrum resolve_peaks(std::vector<AoAPeak> peaks, double resolution) {
  std::sort(peaks.begin(), peaks.end(), [](const AoAPeak& a, const AoAPeak& b) {
    return a.magnitude != b.magnitude ? a.magnitude > b.magnitude : a.angle < b.angle;
  });
  AoASpectrum out;
  for (const auto& p : peaks) {
    const bool shadowed = std::any_of(out.peaks.begin(), out.peaks.end(),
                                      [&](const AoAPeak& q) { return angular_distance(p.angle, q.angle) < resolution; });
    if (!shadowed) out.peaks.push_back(p);
  }
  std::sort(out.peaks.begin(), out.peaks.end(), [](const AoAPeak& a, const AoAPeak& b) { return a.angle < b.angle; });
  return out;
}

}  // namespace detail

/// Synthesises the AoA spectrum the receiver builds from the peer's uW beacon: the direct
/// path when unobstructed, plus first-order reflections off blockage faces whose two legs
/// are clear. Diffuse reflections need `rng`.
inline AoASpectrum compute_aoa_spectrum(const BlockageField& field, Point2D tx, Point2D rx, const SpectrumOptions& opt,
                                        Rng* rng = nullptr) {
  require(!(tx == rx), "transmitter and receiver must differ");
  require(opt.reflections == ReflectionModel::Specular || rng != nullptr, "diffuse reflections need a generator");
  if (field.covers(tx) || field.covers(rx)) throw EndpointCovered();

  std::vector<AoAPeak> peaks;
  const double d = distance(tx, rx);
  if (!field.blocked(tx, rx)) peaks.push_back({detail::path_power(opt, d), bearing(rx, tx)});

  const double reach = detail::reflection_reach(opt);
  if (reach > d) {
    const Point2D mid = 0.5 * (tx + rx);
    for (auto idx : field.near(mid, 0.5 * reach)) {
      const auto& rect = field.rects()[idx];
      for (const auto& face : rect.faces()) {
        const double tx_side = dot(tx - face.a, face.normal);
        const double rx_side = dot(rx - face.a, face.normal);
        if (tx_side <= 1e-9 || rx_side <= 1e-9) continue;
        const Point2D edge = face.b - face.a;
        double u = 0.0;
        if (opt.reflections == ReflectionModel::Specular) {
          const Point2D image = tx - (2.0 * tx_side) * face.normal;
          const Point2D ray = image - rx;
          const double denom = cross(ray, edge);
          if (std::fabs(denom) < 1e-12) continue;
          u = cross(face.a - rx, ray) / denom;
          if (!(u > 0.0 && u < 1.0)) continue;
        } else {
          u = uniform01(*rng);
        }
        const Point2D hit = face.a + u * edge;
        const double length = distance(tx, hit) + distance(hit, rx);
        const double power = detail::path_power(opt, length) * opt.reflection_loss;
        if (power < opt.peak_floor) continue;
        if (field.blocked(tx, hit) || field.blocked(hit, rx)) continue;
        peaks.push_back({power, bearing(rx, hit)});
      }
    }
  }
  std::erase_if(peaks, [&](const AoAPeak& p) { return p.magnitude < opt.peak_floor; });
  return detail::resolve_peaks(std::move(peaks), opt.resolution);
}

inline AoASpectrum compute_aoa_spectrum(const NetworkRealization& net, Point2D tx, Point2D rx, const SpectrumOptions& opt,
                                        Rng* rng = nullptr) {
  return compute_aoa_spectrum(net.blockages, tx, rx, opt, rng);
}

/// Combined spectrum of a full profile: peaks whose angle recurs in every one of the W
/// spectra. Peaks from all spectra are clustered on the circle by single linkage at
/// `tolerance`; a cluster survives if each spectrum contributes and every member lies within
/// `tolerance` of the cluster's circular mean. Its magnitude is the summed member power
/// over W, its angle the circular mean.
inline AoASpectrum combine_profile(const PeerProfile& profile, double tolerance) {
  if (!profile.full()) throw ProfileNotFull(profile.size(), profile.window());
  require(tolerance > 0.0, "angular tolerance must be positive");

  struct Member {
    AoAPeak peak;
    std::size_t spectrum;
  };
  std::vector<Member> pool;
  for (std::size_t j = 0; j < profile.spectra().size(); ++j)
    for (const auto& p : profile.spectra()[j].peaks) pool.push_back({{p.magnitude, wrap_angle(p.angle)}, j});
  AoASpectrum out;
  if (pool.empty()) return out;
  std::sort(pool.begin(), pool.end(), [](const Member& a, const Member& b) {
    return a.peak.angle != b.peak.angle ? a.peak.angle < b.peak.angle : a.spectrum < b.spectrum;
  });

  // Start just after the widest gap so no cluster straddles the seam.
  const std::size_t n = pool.size();
  std::size_t start = 0;
  double widest = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double next = i + 1 < n ? pool[i + 1].peak.angle : pool[0].peak.angle + kTwoPi;
    if (next - pool[i].peak.angle > widest) {
      widest = next - pool[i].peak.angle;
      start = (i + 1) % n;
    }
  }

  const std::size_t w = profile.window();
  auto flush = [&](const std::vector<Member>& cluster) {
    std::vector<bool> seen(w, false);
    for (const auto& m : cluster) seen[m.spectrum] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return;
    double sx = 0.0, sy = 0.0, power = 0.0;
    for (const auto& m : cluster) {
      sx += std::cos(m.peak.angle);
      sy += std::sin(m.peak.angle);
      power += m.peak.magnitude;
    }
    const double mean = cluster.size() == 1 ? cluster.front().peak.angle : wrap_angle(std::atan2(sy, sx));
    for (const auto& m : cluster)
      if (angular_distance(m.peak.angle, mean) > tolerance) return;
    out.peaks.push_back({power / static_cast<double>(w), mean});
  };

  std::vector<Member> cluster{pool[start]};
  for (std::size_t k = 1; k < n; ++k) {
    const auto& m = pool[(start + k) % n];
    if (angular_distance(m.peak.angle, cluster.back().peak.angle) > tolerance) {
      flush(cluster);
      cluster.clear();
    }
    cluster.push_back(m);
  }
  flush(cluster);
  std::sort(out.peaks.begin(), out.peaks.end(), [](const AoAPeak& a, const AoAPeak& b) { return a.angle < b.angle; });
  return out;
}

/// One surviving peak means an unobstructed peer in that direction.
inline BandDecision decide_band(const AoASpectrum& combined) {
  if (combined.size() == 1) return MmWave{combined.peaks.front().angle};
  return MicroWave{};
}

struct MechanismParams {
  std::size_t window = 2;
  double tolerance = deg_to_rad(2.0);
  double jitter_sigma = 0.3;  // m
  SpectrumOptions spectrum{.reflections = ReflectionModel::Diffuse};
};

inline MechanismParams mechanism_params(const SystemParams& p) {
  MechanismParams m;
  m.spectrum = spectrum_options(p);
  m.spectrum.reflections = ReflectionModel::Diffuse;
  return m;
}

struct MechanismResult {
  BandDecision decision;
  AoASpectrum combined;
  PeerProfile profile;
};

/// Runs W observation rounds with the receiver jittered each round, then combines and decides.
inline MechanismResult run_mechanism(const BlockageField& field, Point2D tx, Point2D rx, const MechanismParams& mp, Rng& rng) {
  require(mp.jitter_sigma >= 0.0, "jitter sigma must be non-negative");
  if (field.covers(tx) || field.covers(rx)) throw EndpointCovered();
  PeerProfile profile(mp.window);
  std::normal_distribution<double> jitter(0.0, mp.jitter_sigma > 0.0 ? mp.jitter_sigma : 1.0);
  for (std::size_t round = 0; round < mp.window; ++round) {
    Point2D at = rx;
    if (mp.jitter_sigma > 0.0) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        const double dx = jitter(rng);
        const Point2D cand = rx + Point2D{dx, jitter(rng)};
        if (!field.covers(cand) && !(cand == tx)) {
          at = cand;
          break;
        }
      }
    }
    profile.push(compute_aoa_spectrum(field, tx, at, mp.spectrum, &rng));
  }
  auto combined = combine_profile(profile, mp.tolerance);
  auto decision = decide_band(combined);
  return {decision, std::move(combined), std::move(profile)};
}

inline MechanismResult run_mechanism(const NetworkRealization& net, Point2D tx, Point2D rx, const MechanismParams& mp, Rng& rng) {
  return run_mechanism(net.blockages, tx, rx, mp, rng);
}

/// CSV rows angle_deg,magnitude_dbm,round_index; the combined spectrum uses round_index -1.
inline void write_profile_csv(std::ostream& os, const PeerProfile& profile, const AoASpectrum* combined = nullptr) {
  os << "angle_deg,magnitude_dbm,round_index\n";
  auto row = [&](const AoAPeak& p, long round) {
    os << rad_to_deg(p.angle) << ',' << watts_to_dbm(p.magnitude) << ',' << round << '\n';
  };
  for (std::size_t j = 0; j < profile.spectra().size(); ++j)
    for (const auto& p : profile.spectra()[j].peaks) row(p, static_cast<long>(j));
  if (combined)
    for (const auto& p : combined->peaks) row(p, -1);
}

}  // namespace hd2d
