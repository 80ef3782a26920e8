#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hd2d/config.hpp"
#include "hd2d/evaluator.hpp"
#include "hd2d/simulator.hpp"

namespace hd2d {

struct CurveOutput {
  std::string mode;
  CoverageCurve curve;
  std::filesystem::path csv;
  std::filesystem::path manifest;
  std::string manifest_hash;
};

struct ExperimentResult {
  double pkd = 0.0;
  std::vector<CurveOutput> curves;
  std::vector<std::filesystem::path> profile_dumps;
  bool has_failures() const {
    for (const auto& c : curves)
      if (c.curve.has_failures()) return true;
    return false;
  }
};

/// Regenerates iteration `index` of a mechanism run and returns its peer profile.
inline MechanismResult mechanism_trace(const SystemParams& p, const SimConfig& cfg, std::size_t index) {
  Rng drop = substream(cfg.root_seed, index, detail::kDrop);
  Rng mech = substream(cfg.root_seed, index, detail::kMechanism);
  SimConfig c = cfg;
  c.mode = SimMode::HybridMechanism;
  const auto net = draw_realization(p, c, drop);
  return run_mechanism(net.blockages, net.test_tx, {}, cfg.mechanism, mech);
}

inline CoverageCurve compute_curve(const ExperimentConfig& cfg, const ModeSpec& mode, double pkd) {
  if (mode.source == CurveSource::Analytic) return sweep(cfg.axis, cfg.grid, cfg.system, pkd, mode.band, cfg.gamma_db);
  SimConfig sim = cfg.simulation;
  sim.mode = mode.sim;
  sim.root_seed = cfg.seed;
  return simulate_hybrid(cfg.system, sim, pkd, cfg.axis, cfg.grid, cfg.gamma_db);
}

/// Runs every requested mode and writes `<name>_<mode>.csv` with a `.manifest.json` beside it.
/// Failed points are left out of the CSV; check `has_failures()`.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  ExperimentResult out;
  out.pkd = resolve_pkd(cfg.system, cfg.seed, cfg.pkd_cells);

  for (const auto& name : cfg.modes) {
    const ModeSpec& mode = *find_mode(name);
    CurveOutput co{name, compute_curve(cfg, mode, out.pkd), {}, {}, {}};
    const Manifest manifest = cfg.manifest(name, out.pkd);
    co.manifest_hash = manifest.hash();
    const fs::path base = fs::path(cfg.output_dir) / (cfg.name + "_" + name);
    co.csv = base;
    co.csv += ".csv";
    co.manifest = base;
    co.manifest += ".manifest.json";
    {
      std::ofstream csv(co.csv, std::ios::binary);
      write_curve_csv(csv, co.curve, co.manifest_hash);
      std::ofstream mf(co.manifest, std::ios::binary);
      mf << manifest.text();
      if (!csv || !mf) throw Error("cannot write outputs under " + cfg.output_dir);
    }
    if (log) {
      *log << co.csv.string();
      for (const auto& p : co.curve.points)
        if (p.failed) *log << "\n  point x=" << p.x << " failed: " << p.error;
      *log << '\n';
    }
    if (mode.sim == SimMode::HybridMechanism && mode.source == CurveSource::MonteCarlo) {
      SimConfig sim = cfg.simulation;
      sim.root_seed = cfg.seed;
      const auto n = std::min(cfg.profile_dumps, sim.iterations);
      for (std::size_t i = 0; i < n; ++i) {
        const auto trace = mechanism_trace(cfg.system, sim, i);
        fs::path path = fs::path(cfg.output_dir) / (cfg.name + "_profile_" + std::to_string(i) + ".csv");
        std::ofstream f(path, std::ios::binary);
        f << "# manifest_sha: " << co.manifest_hash << '\n';
        f << "# iteration: " << i << ", decision: " << (is_mmwave(trace.decision) ? "mmw" : "uw") << '\n';
        write_profile_csv(f, trace.profile, &trace.combined);
        out.profile_dumps.push_back(path);
      }
    }
    out.curves.push_back(std::move(co));
  }
  return out;
}

/// Named figure reproductions. Each returns one config per parameter set in the figure.
enum class Preset { Fig4, Fig5, Fig6 };

inline Preset parse_preset(std::string_view s) {
  if (s == "fig4") return Preset::Fig4;
  if (s == "fig5") return Preset::Fig5;
  if (s == "fig6") return Preset::Fig6;
  throw InvalidArgument("unknown preset '" + std::string(s) + "' (fig4, fig5, fig6)");
}

inline std::string format_param(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline std::vector<ExperimentConfig> preset_configs(Preset preset, std::uint64_t seed = 1, std::size_t iterations = 10'000,
                                                    const std::string& output_dir = "out") {
  ExperimentConfig base;
  base.seed = seed;
  base.output_dir = output_dir;
  base.simulation.iterations = iterations;
  // Analytic-matched Monte Carlo: Bernoulli LOS and the mean-radius sensing abstraction.
  base.simulation.los = LosModel::Bernoulli;
  base.simulation.sensing = SensingModel::MeanRadius;
  base.simulation.deferral = DeferralPolicy::ConditionOnAccess;
  base.simulation.mechanism = mechanism_params(base.system);
  base.modes = {"analytic_hybrid", "analytic_mmw", "analytic_uw", "mc_hybrid_oracle"};

  std::vector<ExperimentConfig> out;
  switch (preset) {
    case Preset::Fig4:
      for (double beta : {0.0027, 0.0053}) {
        ExperimentConfig c = base;
        c.name = "fig4_beta" + format_param(beta);
        c.system.beta_per_m = beta;
        c.system.d0_m = 50.0;
        c.axis = Axis::SinrThresholdDb;
        c.grid = linear_grid(-10.0, 20.0, 1.0);
        out.push_back(c);
      }
      break;
    case Preset::Fig5:
      for (double density : {50.0, 100.0}) {
        ExperimentConfig c = base;
        c.name = "fig5_dt" + format_param(density);
        c.system.dt_density_per_km2 = density;
        c.system.beta_per_m = 0.0053;
        c.axis = Axis::DistanceM;
        c.gamma_db = 0.0;
        c.grid = linear_grid(10.0, 150.0, 10.0);
        out.push_back(c);
      }
      break;
    case Preset::Fig6: {
      ExperimentConfig c = base;
      c.name = "fig6";
      c.system.d0_m = 50.0;
      c.system.dt_density_per_km2 = 50.0;
      c.axis = Axis::RateBps;
      c.grid = linear_grid(1e7, 1e9, 1e7);
      out.push_back(c);
      break;
    }
  }
  return out;
}

}  // namespace hd2d
