#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hd2d/analysis_mmw.hpp"
#include "hd2d/analysis_uw.hpp"
#include "hd2d/aoa.hpp"
#include "hd2d/curve.hpp"
#include "hd2d/evaluator.hpp"
#include "hd2d/geometry.hpp"
#include "hd2d/propagation.hpp"
#include "hd2d/rng.hpp"
#include "hd2d/system_params.hpp"

namespace hd2d {

enum class SimMode { MmwOnly, UwOnly, HybridOracle, HybridMechanism };

/// How LOS status is decided for the test link and for interferers.
enum class LosModel {
  Bernoulli,  // independent exp(-beta r) coin per link, matching the analysis
  Geometric,  // segment test against sampled rectangles
};

/// How channel k_d sensing is realised in the uW band.
enum class SensingModel {
  MeanRadius,      // exclusion disc of the mean threshold radius; DTs kept w.p. p_a
  PerRealization,  // aggregate faded BS power against tau at each transmitter
};

/// What a busy-sensing test transmitter contributes to the coverage estimate.
enum class DeferralPolicy { Outage, ConditionOnAccess };

inline std::string_view to_string(SimMode m) {
  switch (m) {
    case SimMode::MmwOnly: return "mmw_only";
    case SimMode::UwOnly: return "uw_only";
    case SimMode::HybridOracle: return "hybrid_oracle";
    case SimMode::HybridMechanism: return "hybrid_mechanism";
  }
  return "?";
}

struct SimConfig {
  std::size_t iterations = 10'000;
  double window_half_width = 5'000.0;  // m
  std::uint64_t root_seed = 1;
  SimMode mode = SimMode::HybridOracle;
  LosModel los = LosModel::Bernoulli;
  SensingModel sensing = SensingModel::MeanRadius;
  DeferralPolicy deferral = DeferralPolicy::Outage;
  bool nlos_interference = false;
  // Rectangle sizes for geometric drops; density follows from beta.
  Range blockage_length{10.0, 30.0};
  Range blockage_width{10.0, 30.0};
  // Half-width of the local rectangle drop used when only the test link needs geometry.
  double local_blockage_half_width = 300.0;
  MechanismParams mechanism;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const {
    require(iterations >= 1, "iterations must be >= 1");
    require(window_half_width > 0.0, "window half-width must be positive");
    require(blockage_length.min > 0.0 && blockage_length.min <= blockage_length.max, "blockage length range invalid");
    require(blockage_width.min > 0.0 && blockage_width.min <= blockage_width.max, "blockage width range invalid");
    require(local_blockage_half_width > 0.0, "local blockage half-width must be positive");
  }
};

inline BlockageProcess blockage_process(const SystemParams& p, const SimConfig& cfg) {
  return {density_for_beta(p.beta_per_m, cfg.blockage_length, cfg.blockage_width), cfg.blockage_length, cfg.blockage_width};
}

struct SinrSample {
  double sinr = 0.0;  // linear
  Band band_used = Band::MmWave;
  bool los = true;
  double interference = 0.0;  // W
  bool accessed = true;       // uW: channel sensed free
};

namespace detail {

// Substream tags so that paired runs (e.g. oracle vs mechanism) share realizations.
enum Stream : std::uint64_t { kDrop = 1, kLink = 2, kMmw = 3, kUw = 4, kMechanism = 5 };

struct KahanSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

inline bool needs_geometry(const SimConfig& cfg) { return cfg.los == LosModel::Geometric || cfg.mode == SimMode::HybridMechanism; }

}  // namespace detail

/// Drops DTs and BSs over the window, rectangles when the configuration needs geometry,
/// and the test pair (receiver at the origin, transmitter at d0). Drops covering either
/// endpoint are resampled.
inline NetworkRealization draw_realization(const SystemParams& p, const SimConfig& cfg, Rng& rng) {
  NetworkRealization net;
  net.window_half_width = cfg.window_half_width;
  net.dts = sample_ppp(p.dt_density(), cfg.window_half_width, rng);
  net.bss = sample_ppp(p.bs_density(), cfg.window_half_width, rng);
  if (detail::needs_geometry(cfg) && p.beta_per_m > 0.0) {
    const auto proc = blockage_process(p, cfg);
    const double hw = cfg.los == LosModel::Geometric ? cfg.window_half_width : cfg.local_blockage_half_width;
    for (int attempt = 0;; ++attempt) {
      BlockageField field(sample_blockages(proc, hw, rng));
      if (!field.covers({0.0, 0.0})) {
        net.blockages = std::move(field);
        break;
      }
      if (attempt > 1000) throw EndpointCovered();
    }
  }
  net.test_tx = place_test_tx(p.d0_m, net.blockages, rng);
  return net;
}

/// Each DT kept independently with probability q (slotted Aloha).
inline std::vector<Point2D> aloha_thin(std::span<const Point2D> dts, double q, Rng& rng) {
  std::vector<Point2D> kept;
  kept.reserve(static_cast<std::size_t>(q * static_cast<double>(dts.size())) + 16);
  for (const auto& d : dts)
    if (bernoulli(rng, q)) kept.push_back(d);
  return kept;
}

/// Effective gain between the receiver at the origin (beam at `rx_beam`) and an interferer
/// at bearing `to_dt` whose own beam points at `facing`.
inline double sectored_gain(const AntennaPattern& pat, double to_dt, double rx_beam, double facing) {
  const double half_beam = 0.5 * pat.beamwidth;
  const bool rx_main = angular_distance(to_dt, rx_beam) <= half_beam;
  const bool tx_main = angular_distance(facing, wrap_angle(to_dt + kPi)) <= half_beam;
  return (rx_main ? pat.mainlobe_gain : pat.sidelobe_gain) * (tx_main ? pat.mainlobe_gain : pat.sidelobe_gain);
}

/// Aggregate mmW interference at the origin with the receive beam pointing at `rx_beam`.
inline double mmw_interference(const SystemParams& p, const SimConfig& cfg, const NetworkRealization& net, double rx_beam,
                               Rng& rng) {
  const auto pat = p.pattern();
  const auto band = p.mmw_band();
  const double c = pathloss_constant(band.carrier_frequency);
  const double pd = p.dt_power_w();
  const Point2D origin{};
  detail::KahanSum total;
  for (const auto& d : aloha_thin(net.dts, p.aloha_access, rng)) {
    const double r = norm(d);
    if (r <= 0.0) continue;
    bool los;
    if (cfg.los == LosModel::Bernoulli) {
      los = bernoulli(rng, std::exp(-p.beta_per_m * r));
    } else {
      los = !net.blockages.covers(d) && !net.blockages.blocked(d, origin);
    }
    if (!los && !cfg.nlos_interference) continue;
    const double facing = uniform(rng, 0.0, kTwoPi);
    const double g = sectored_gain(pat, bearing(origin, d), rx_beam, facing);
    const double h = sample_rayleigh_gain(rng);
    total.add(pd * h * g * c * std::pow(r, -(los ? band.alpha_los : band.alpha_nlos)));
  }
  return total.sum;
}

/// One mmW draw for the test link. `rx_gain_scale` < 1 models a misaligned receive beam.
inline SinrSample simulate_mmw_iteration(const SystemParams& p, const SimConfig& cfg, const NetworkRealization& net,
                                         bool test_link_los, Rng& rng, double rx_gain_scale = 1.0) {
  const auto pat = p.pattern();
  const auto band = p.mmw_band();
  const double c = pathloss_constant(band.carrier_frequency);
  const double rx_beam = bearing({}, net.test_tx);
  const double interference = mmw_interference(p, cfg, net, rx_beam, rng);
  const double h0 = sample_rayleigh_gain(rng);
  const double alpha = test_link_los ? band.alpha_los : band.alpha_nlos;
  const double g = pat.mainlobe_gain * pat.mainlobe_gain * rx_gain_scale;
  const double signal = p.dt_power_w() * h0 * g * c * std::pow(p.d0_m, -alpha);
  return {signal / (band.noise_power + interference), Band::MmWave, test_link_los, interference, true};
}

/// Aggregate faded BS power at `at` from the k_d-active base stations (sensing statistic).
inline double sensed_bs_power(const SystemParams& p, std::span<const Point2D> active, Point2D at, double reach, Rng& rng) {
  const double pb = p.bs_power_w() * (p.threshold_includes_pathloss_constant ? pathloss_constant(p.frequency_uw_hz) : 1.0);
  double total = 0.0;
  const double reach2 = reach * reach;
  for (const auto& b : active) {
    const Point2D d = b - at;
    const double r2 = dot(d, d);
    if (r2 > reach2) continue;
    total += pb * sample_rayleigh_gain(rng) * std::pow(std::max(r2, 1e-6), -0.5 * p.alpha_uw);
  }
  return total;
}

/// One uW draw. The test pair transmits only when k_d is sensed free; otherwise the
/// sample is flagged `accessed = false` with SINR 0.
inline SinrSample simulate_uw_iteration(const SystemParams& p, const SimConfig& cfg, const NetworkRealization& net, double pkd,
                                        Rng& rng) {
  const auto band = p.uw_band();
  const double c = pathloss_constant(band.carrier_frequency);
  const double alpha = p.alpha_uw;
  const double pd = p.dt_power_w(), pb = p.bs_power_w();
  const double radius = mean_threshold_radius(p.threshold_includes_pathloss_constant ? pb * c : pb, p.tau_w(), alpha);
  const double radius2 = radius * radius;

  std::vector<Point2D> active;
  for (const auto& b : net.bss)
    if (bernoulli(rng, pkd)) active.push_back(b);

  bool access = true;
  if (cfg.sensing == SensingModel::MeanRadius) {
    for (const auto& b : active)
      if (dot(b, b) < radius2) access = false;
  } else {
    access = sensed_bs_power(p, active, net.test_tx, 1e300, rng) < p.tau_w();
  }
  if (!access) return {0.0, Band::MicroWave, false, 0.0, false};

  detail::KahanSum i_dt, i_bs;
  const double pa = availability(p.bs_density(), pkd, radius);
  for (const auto& d : net.dts) {
    bool transmits;
    if (cfg.sensing == SensingModel::MeanRadius) {
      transmits = bernoulli(rng, pa);
    } else {
      transmits = sensed_bs_power(p, active, d, 4.0 * radius, rng) < p.tau_w();
    }
    if (!transmits) continue;
    const double r2 = dot(d, d);
    if (r2 <= 0.0) continue;
    i_dt.add(pd * sample_rayleigh_gain(rng) * c * std::pow(r2, -0.5 * alpha));
  }
  for (const auto& b : active) {
    const double r2 = dot(b, b);
    if (r2 <= 0.0) continue;
    i_bs.add(pb * sample_rayleigh_gain(rng) * c * std::pow(r2, -0.5 * alpha));
  }
  const double interference = i_dt.sum + i_bs.sum;
  const double signal = pd * sample_rayleigh_gain(rng) * c * std::pow(p.d0_m, -alpha);
  return {signal / (band.noise_power + interference), Band::MicroWave, false, interference, true};
}

/// One full iteration of the configured mode, from per-iteration substreams of root_seed.
inline SinrSample simulate_iteration(const SystemParams& p, const SimConfig& cfg, double pkd, std::size_t index) {
  Rng drop = substream(cfg.root_seed, index, detail::kDrop);
  Rng link = substream(cfg.root_seed, index, detail::kLink);
  Rng mm = substream(cfg.root_seed, index, detail::kMmw);
  Rng uw = substream(cfg.root_seed, index, detail::kUw);
  const auto net = draw_realization(p, cfg, drop);
  const Point2D origin{};

  auto test_link_los = [&] {
    if (cfg.los == LosModel::Bernoulli || net.blockages.empty()) return bernoulli(link, los_probability(p.d0_m, p.beta_per_m));
    return !net.blockages.blocked(origin, net.test_tx);
  };

  switch (cfg.mode) {
    case SimMode::MmwOnly: return simulate_mmw_iteration(p, cfg, net, test_link_los(), mm);
    case SimMode::UwOnly: return simulate_uw_iteration(p, cfg, net, pkd, uw);
    case SimMode::HybridOracle: {
      const bool los = test_link_los();
      return los ? simulate_mmw_iteration(p, cfg, net, true, mm) : simulate_uw_iteration(p, cfg, net, pkd, uw);
    }
    case SimMode::HybridMechanism: {
      Rng mech = substream(cfg.root_seed, index, detail::kMechanism);
      const bool los = net.blockages.empty() || !net.blockages.blocked(origin, net.test_tx);
      const auto result = run_mechanism(net.blockages, net.test_tx, origin, cfg.mechanism, mech);
      if (const auto* mmw = std::get_if<MmWave>(&result.decision)) {
        const double err = angular_distance(mmw->beam_angle, bearing(origin, net.test_tx));
        const auto pat = p.pattern();
        const double scale = err <= 0.5 * pat.beamwidth ? 1.0 : pat.sidelobe_gain / pat.mainlobe_gain;
        return simulate_mmw_iteration(p, cfg, net, los, mm, scale);
      }
      auto s = simulate_uw_iteration(p, cfg, net, pkd, uw);
      s.los = los;
      return s;
    }
  }
  return {};
}

/// Runs `fn(i)` for i in [0, n) on `threads` workers; results land by index so the output
/// does not depend on scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<T> out(n);
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline std::vector<SinrSample> simulate_samples(const SystemParams& p, const SimConfig& cfg, double pkd) {
  p.validate();
  cfg.validate();
  return parallel_map<SinrSample>(cfg.iterations, cfg.threads, [&](std::size_t i) { return simulate_iteration(p, cfg, pkd, i); });
}

/// Empirical coverage over a threshold grid from one batch of samples (common random
/// numbers across the grid). Rate thresholds use the bandwidth of the band each sample used.
/// Under ConditionOnAccess the uW share keeps its weight n_uW / n and only its hit rate is
/// conditioned on access, so the band mix is not skewed by deferring pairs.
inline CoverageCurve coverage_from_samples(std::span<const SinrSample> samples, Axis axis, std::span<const double> grid,
                                           const SystemParams& p, const SimConfig& cfg) {
  require(axis != Axis::DistanceM, "distance curves need one batch per grid point");
  CoverageCurve curve{axis, CurveSource::MonteCarlo, std::string(to_string(cfg.mode)), {}};
  const bool condition = cfg.deferral == DeferralPolicy::ConditionOnAccess;
  for (double x : grid) {
    std::size_t total[2] = {0, 0}, counted[2] = {0, 0}, hits[2] = {0, 0};  // [mmW, uW]
    for (const auto& s : samples) {
      const int b = s.band_used == Band::MmWave ? 0 : 1;
      ++total[b];
      if (!s.accessed && condition) continue;
      ++counted[b];
      bool ok;
      if (axis == Axis::SinrThresholdDb) {
        ok = s.sinr >= db_to_linear(x);
      } else {
        const double bw = b == 0 ? p.bandwidth_mm_hz : p.bandwidth_uw_hz;
        ok = bw * (p.rate_in_bits ? std::log2(1.0 + s.sinr) : std::log1p(s.sinr)) >= x;
      }
      hits[b] += ok ? 1 : 0;
    }
    const double n = static_cast<double>(total[0] + total[1]);
    double prob = 0.0, var = 0.0;
    bool empty = false;
    for (int b = 0; b < 2; ++b) {
      if (total[b] == 0) continue;
      if (counted[b] == 0) {
        empty = true;
        continue;
      }
      const double w = static_cast<double>(total[b]) / n;
      prob += w * static_cast<double>(hits[b]) / static_cast<double>(counted[b]);
      const double hw = wilson_halfwidth(hits[b], counted[b]);
      var += w * w * hw * hw;
    }
    curve.points.push_back({x, prob, std::sqrt(var), empty, empty ? "no accessed samples" : ""});
  }
  return curve;
}

/// Monte Carlo coverage curve for the configured mode. Distance sweeps re-run the batch for
/// each d0 with the same per-iteration seeds.
inline CoverageCurve simulate_hybrid(const SystemParams& p, const SimConfig& cfg, double pkd, Axis axis,
                                     std::span<const double> grid, double gamma_db = 0.0) {
  require(!grid.empty(), "grid must not be empty");
  if (axis != Axis::DistanceM) {
    const auto samples = simulate_samples(p, cfg, pkd);
    return coverage_from_samples(samples, axis, grid, p, cfg);
  }
  CoverageCurve curve{axis, CurveSource::MonteCarlo, std::string(to_string(cfg.mode)), {}};
  const double g[] = {gamma_db};
  for (double d0 : grid) {
    SystemParams q = p;
    q.d0_m = d0;
    const auto samples = simulate_samples(q, cfg, pkd);
    auto point = coverage_from_samples(samples, Axis::SinrThresholdDb, g, q, cfg).points.front();
    point.x = d0;
    curve.points.push_back(point);
  }
  return curve;
}

/// Sample mean of exp(-s I) with a 95 % percentile-bootstrap half-width.
inline LaplaceEvaluation empirical_laplace(std::span<const double> interference, double s, std::uint64_t bootstrap_seed = 7,
                                           std::size_t resamples = 200) {
  require(!interference.empty(), "need interference samples");
  require(s >= 0.0, "Laplace argument must be non-negative");
  std::vector<double> v(interference.size());
  std::transform(interference.begin(), interference.end(), v.begin(), [s](double i) { return std::exp(-s * i); });
  detail::KahanSum acc;
  for (double x : v) acc.add(x);
  const double n = static_cast<double>(v.size());
  const double mean = acc.sum / n;

  Rng rng(bootstrap_seed);
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
  std::vector<double> means;
  means.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    detail::KahanSum k;
    for (std::size_t i = 0; i < v.size(); ++i) k.add(v[pick(rng)]);
    means.push_back(k.sum / n);
  }
  std::sort(means.begin(), means.end());
  const auto q = [&](double f) { return means[static_cast<std::size_t>(f * static_cast<double>(means.size() - 1))]; };
  return {mean, LaplaceMethod::Empirical, 0.0, 0.5 * (q(0.975) - q(0.025))};
}

enum class InterferenceKind {
  Mmw,   // LOS mmW DT interference, receive beam towards the test transmitter
  UwDt,  // uW DT interference, DTs thinned by availability
  UwBs,  // uW interference from k_d-active BSs outside the mean threshold radius
};

/// Independent interference draws for the empirical Laplace oracles.
inline std::vector<double> sample_interference(const SystemParams& p, const SimConfig& cfg, double pkd, InterferenceKind kind) {
  p.validate();
  cfg.validate();
  return parallel_map<double>(cfg.iterations, cfg.threads, [&](std::size_t i) {
    Rng rng = substream(cfg.root_seed, i, detail::kDrop);
    const double hw = cfg.window_half_width;
    const double c = pathloss_constant(p.frequency_uw_hz);
    const double alpha = p.alpha_uw;
    switch (kind) {
      case InterferenceKind::Mmw: {
        NetworkRealization net;
        net.window_half_width = hw;
        net.dts = sample_ppp(p.dt_density(), hw, rng);
        net.test_tx = polar(p.d0_m, uniform(rng, 0.0, kTwoPi));
        return mmw_interference(p, cfg, net, bearing({}, net.test_tx), rng);
      }
      case InterferenceKind::UwDt: {
        const double radius = mean_threshold_radius(
            p.threshold_includes_pathloss_constant ? p.bs_power_w() * c : p.bs_power_w(), p.tau_w(), alpha);
        const double pa = availability(p.bs_density(), pkd, radius);
        // Independent thinning of a PPP is a PPP of the thinned density.
        detail::KahanSum total;
        for (const auto& d : sample_ppp(pa * p.dt_density(), hw, rng))
          total.add(p.dt_power_w() * sample_rayleigh_gain(rng) * c * std::pow(dot(d, d), -0.5 * alpha));
        return total.sum;
      }
      case InterferenceKind::UwBs: {
        const double radius = mean_threshold_radius(
            p.threshold_includes_pathloss_constant ? p.bs_power_w() * c : p.bs_power_w(), p.tau_w(), alpha);
        detail::KahanSum total;
        for (const auto& b : sample_ppp(pkd * p.bs_density(), hw, rng)) {
          const double r2 = dot(b, b);
          if (r2 < radius * radius) continue;
          total.add(p.bs_power_w() * sample_rayleigh_gain(rng) * c * std::pow(r2, -0.5 * alpha));
        }
        return total.sum;
      }
    }
    return 0.0;
  });
}

}  // namespace hd2d
