#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "hd2d/aoa.hpp"
#include "hd2d/curve.hpp"
#include "hd2d/errors.hpp"
#include "hd2d/manifest.hpp"
#include "hd2d/simulator.hpp"
#include "hd2d/system_params.hpp"

namespace hd2d {

/// Parse or validation failure, already formatted as `file:line:col: field: message`.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// One requested curve family: analytic per band, or a Monte Carlo mode.
struct ModeSpec {
  std::string name;
  CurveSource source = CurveSource::Analytic;
  Band band = Band::Hybrid;
  SimMode sim = SimMode::HybridOracle;
};

inline const std::vector<ModeSpec>& known_modes() {
  static const std::vector<ModeSpec> modes = {
      {"analytic_hybrid", CurveSource::Analytic, Band::Hybrid, SimMode::HybridOracle},
      {"analytic_mmw", CurveSource::Analytic, Band::MmWave, SimMode::MmwOnly},
      {"analytic_uw", CurveSource::Analytic, Band::MicroWave, SimMode::UwOnly},
      {"mc_hybrid_oracle", CurveSource::MonteCarlo, Band::Hybrid, SimMode::HybridOracle},
      {"mc_hybrid_mechanism", CurveSource::MonteCarlo, Band::Hybrid, SimMode::HybridMechanism},
      {"mc_mmw_only", CurveSource::MonteCarlo, Band::MmWave, SimMode::MmwOnly},
      {"mc_uw_only", CurveSource::MonteCarlo, Band::MicroWave, SimMode::UwOnly},
  };
  return modes;
}

inline const ModeSpec* find_mode(std::string_view name) {
  for (const auto& m : known_modes())
    if (m.name == name) return &m;
  return nullptr;
}

struct ExperimentConfig {
  std::string name = "run";  // output file prefix
  SystemParams system;
  Axis axis = Axis::SinrThresholdDb;
  std::vector<double> grid;
  double gamma_db = 0.0;  // fixed threshold for distance sweeps
  std::vector<std::string> modes = {"analytic_hybrid", "analytic_mmw", "analytic_uw"};
  SimConfig simulation;
  std::size_t pkd_cells = 20'000;
  std::size_t profile_dumps = 1;  // mechanism traces written per mechanism curve
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  void validate() const {
    system.validate();
    simulation.validate();
    require(!grid.empty(), "sweep.grid: must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i) require(grid[i] > grid[i - 1], "sweep.grid: must be strictly increasing");
    if (axis == Axis::DistanceM) require(grid.front() > 0.0, "sweep.grid: distances must be positive");
    if (axis == Axis::RateBps) require(grid.front() >= 0.0, "sweep.grid: rates must be non-negative");
    require(!modes.empty(), "modes: must not be empty");
    for (const auto& m : modes) require(find_mode(m) != nullptr, "modes: unknown mode '" + m + "'");
    require(simulation.mechanism.window >= 1, "mechanism.window: must be >= 1");
    require(simulation.mechanism.tolerance > 0.0, "mechanism.tolerance_deg: must be positive");
    require(simulation.mechanism.jitter_sigma >= 0.0, "mechanism.jitter_sigma_m: must be non-negative");
    require(pkd_cells >= 100, "pkd_cells: must be >= 100");
  }

  /// Body of the manifest for one curve. Parsing the `config` member reproduces the curve.
  Manifest manifest(std::string_view mode, double pkd) const {
    nlohmann::json sys = system_to_json(system);
    sys["pkd"] = pkd;
    nlohmann::json cfg = {
        {"name", name},
        {"seed", seed},
        {"system", sys},
        {"sweep", {{"axis", std::string(to_string(axis))}, {"grid", grid}, {"gamma_db", gamma_db}}},
        {"modes", {std::string(mode)}},
        {"simulation", simulation_to_json(simulation)},
        {"mechanism", mechanism_to_json(simulation.mechanism)},
        {"pkd_cells", pkd_cells},
        {"profile_dumps", profile_dumps},
    };
    return {{{"config", cfg}, {"git_describe", std::string(git_describe())}, {"seed", seed}, {"pkd", pkd}}};
  }
};

inline Axis parse_axis(std::string_view s) {
  if (s == "sinr_threshold_db") return Axis::SinrThresholdDb;
  if (s == "distance_m") return Axis::DistanceM;
  if (s == "rate_bps") return Axis::RateBps;
  throw InvalidArgument("unknown axis '" + std::string(s) + "' (sinr_threshold_db, distance_m, rate_bps)");
}

/// start, start + step, ... up to stop inclusive (within half a step).
inline std::vector<double> linear_grid(double start, double stop, double step) {
  require(step > 0.0 && stop >= start, "range needs step > 0 and stop >= start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = start + static_cast<double>(i) * step;
  return g;
}

namespace detail {

class YamlReader {
 public:
  explicit YamlReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Mark& m, std::string_view field, std::string_view msg) const {
    std::string where = source_;
    if (!m.is_null()) where += ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
    throw ConfigError(where + ": " + std::string(field) + ": " + std::string(msg));
  }

  /// Rethrows a validation error at the mark of the field it names.
  [[noreturn]] void fail_validation(const std::string& what) const {
    const auto colon = what.find(':');
    const std::string field = colon == std::string::npos ? "" : what.substr(0, colon);
    for (const auto& key : {field, "system." + field}) {
      if (auto it = marks_.find(key); it != marks_.end())
        fail(it->second, key, colon == std::string::npos ? what : what.substr(colon + 2));
    }
    fail(YAML::Mark::null_mark(), "config", what);
  }

  template <class T>
  T get(const YAML::Node& node, const std::string& field) {
    marks_[field] = node.Mark();
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node.Mark(), field, "cannot convert value '" + scalar(node) + "'");
    }
  }

  Range get_range(const YAML::Node& node, const std::string& field) {
    if (!node.IsSequence() || node.size() != 2) fail(node.Mark(), field, "expected [min, max]");
    return {get<double>(node[0], field), get<double>(node[1], field)};
  }

  void check_keys(const YAML::Node& map, const std::string& section, const std::set<std::string>& allowed) const {
    if (!map.IsMap()) fail(map.Mark(), section, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first.Mark(), section.empty() ? key : section + "." + key, "unknown key");
    }
  }

 private:
  static std::string scalar(const YAML::Node& n) { return n.IsScalar() ? n.Scalar() : "<non-scalar>"; }

  std::string source_;
  std::map<std::string, YAML::Mark> marks_;
};

inline void read_system(YamlReader& r, const YAML::Node& n, SystemParams& p) {
  r.check_keys(n, "system",
               {"dt_power_dbm", "bs_power_dbm", "mainlobe_gain_dbi", "sidelobe_gain_dbi", "beamwidth_deg",
                "bs_density_per_km2", "cu_density_per_km2", "dt_density_per_km2", "alpha_uw", "alpha_los", "alpha_nlos",
                "tau_dbm", "tau_w", "bandwidth_uw_hz", "bandwidth_mm_hz", "frequency_uw_hz", "frequency_mm_hz",
                "noise_figure_db", "beta_per_m", "d0_m", "aloha_access", "channels", "pkd",
                "threshold_includes_pathloss_constant", "uw_dt_laplace", "rate_in_bits"});
  auto num = [&](const char* key, double& out) {
    if (n[key]) out = r.get<double>(n[key], key);
  };
  num("dt_power_dbm", p.dt_power_dbm);
  num("bs_power_dbm", p.bs_power_dbm);
  num("mainlobe_gain_dbi", p.mainlobe_gain_dbi);
  num("sidelobe_gain_dbi", p.sidelobe_gain_dbi);
  num("beamwidth_deg", p.beamwidth_deg);
  num("bs_density_per_km2", p.bs_density_per_km2);
  num("cu_density_per_km2", p.cu_density_per_km2);
  num("dt_density_per_km2", p.dt_density_per_km2);
  num("alpha_uw", p.alpha_uw);
  num("alpha_los", p.alpha_los);
  num("alpha_nlos", p.alpha_nlos);
  num("tau_dbm", p.tau_dbm);
  num("bandwidth_uw_hz", p.bandwidth_uw_hz);
  num("bandwidth_mm_hz", p.bandwidth_mm_hz);
  num("frequency_uw_hz", p.frequency_uw_hz);
  num("frequency_mm_hz", p.frequency_mm_hz);
  num("noise_figure_db", p.noise_figure_db);
  num("beta_per_m", p.beta_per_m);
  num("d0_m", p.d0_m);
  num("aloha_access", p.aloha_access);
  if (n["tau_w"]) {
    const double w = r.get<double>(n["tau_w"], "tau_w");
    if (!(w > 0.0)) r.fail(n["tau_w"].Mark(), "system.tau_w", "must be positive (the threshold radius divides by tau)");
    p.tau_dbm = watts_to_dbm(w);
  }
  if (n["channels"]) p.channels = r.get<int>(n["channels"], "channels");
  if (n["pkd"]) p.pkd_override = r.get<double>(n["pkd"], "pkd");
  if (n["threshold_includes_pathloss_constant"])
    p.threshold_includes_pathloss_constant = r.get<bool>(n["threshold_includes_pathloss_constant"], "threshold_includes_pathloss_constant");
  if (n["rate_in_bits"]) p.rate_in_bits = r.get<bool>(n["rate_in_bits"], "rate_in_bits");
  if (n["uw_dt_laplace"]) {
    const auto s = r.get<std::string>(n["uw_dt_laplace"], "uw_dt_laplace");
    if (s == "closed_form") p.uw_dt_laplace = LaplaceMethod::ClosedForm;
    else if (s == "quadrature") p.uw_dt_laplace = LaplaceMethod::Quadrature;
    else r.fail(n["uw_dt_laplace"].Mark(), "system.uw_dt_laplace", "expected closed_form or quadrature");
  }
}

inline void read_simulation(YamlReader& r, const YAML::Node& n, SimConfig& c) {
  r.check_keys(n, "simulation",
               {"iterations", "window_half_width_m", "los_model", "sensing", "deferral", "nlos_interference",
                "blockage_length_m", "blockage_width_m", "local_blockage_half_width_m", "threads"});
  if (n["iterations"]) {
    const auto it = r.get<long long>(n["iterations"], "simulation.iterations");
    if (it < 1) r.fail(n["iterations"].Mark(), "simulation.iterations", "must be >= 1");
    c.iterations = static_cast<std::size_t>(it);
  }
  if (n["window_half_width_m"]) c.window_half_width = r.get<double>(n["window_half_width_m"], "simulation.window_half_width_m");
  auto choice = [&](const char* key, auto& out, std::initializer_list<std::pair<const char*, std::decay_t<decltype(out)>>> opts) {
    if (!n[key]) return;
    const auto s = r.get<std::string>(n[key], std::string("simulation.") + key);
    std::string names;
    for (const auto& [label, value] : opts) {
      if (s == label) {
        out = value;
        return;
      }
      names += names.empty() ? label : std::string(", ") + label;
    }
    r.fail(n[key].Mark(), std::string("simulation.") + key, "expected one of " + names);
  };
  choice("los_model", c.los, {{"bernoulli", LosModel::Bernoulli}, {"geometric", LosModel::Geometric}});
  choice("sensing", c.sensing, {{"mean_radius", SensingModel::MeanRadius}, {"per_realization", SensingModel::PerRealization}});
  choice("deferral", c.deferral, {{"outage", DeferralPolicy::Outage}, {"condition_on_access", DeferralPolicy::ConditionOnAccess}});
  if (n["nlos_interference"]) c.nlos_interference = r.get<bool>(n["nlos_interference"], "simulation.nlos_interference");
  if (n["blockage_length_m"]) c.blockage_length = r.get_range(n["blockage_length_m"], "simulation.blockage_length_m");
  if (n["blockage_width_m"]) c.blockage_width = r.get_range(n["blockage_width_m"], "simulation.blockage_width_m");
  if (n["local_blockage_half_width_m"])
    c.local_blockage_half_width = r.get<double>(n["local_blockage_half_width_m"], "simulation.local_blockage_half_width_m");
  if (n["threads"]) c.threads = r.get<unsigned>(n["threads"], "simulation.threads");
}

inline void read_mechanism(YamlReader& r, const YAML::Node& n, MechanismParams& m) {
  r.check_keys(n, "mechanism",
               {"window", "tolerance_deg", "jitter_sigma_m", "reflection_loss_db", "peak_floor_dbm", "resolution_deg", "reflections"});
  if (n["window"]) m.window = r.get<std::size_t>(n["window"], "mechanism.window");
  if (n["tolerance_deg"]) m.tolerance = deg_to_rad(r.get<double>(n["tolerance_deg"], "mechanism.tolerance_deg"));
  if (n["jitter_sigma_m"]) m.jitter_sigma = r.get<double>(n["jitter_sigma_m"], "mechanism.jitter_sigma_m");
  if (n["reflection_loss_db"]) m.spectrum.reflection_loss = db_to_linear(r.get<double>(n["reflection_loss_db"], "mechanism.reflection_loss_db"));
  if (n["peak_floor_dbm"]) m.spectrum.peak_floor = dbm_to_watts(r.get<double>(n["peak_floor_dbm"], "mechanism.peak_floor_dbm"));
  if (n["resolution_deg"]) m.spectrum.resolution = deg_to_rad(r.get<double>(n["resolution_deg"], "mechanism.resolution_deg"));
  if (n["reflections"]) {
    const auto s = r.get<std::string>(n["reflections"], "mechanism.reflections");
    if (s == "specular") m.spectrum.reflections = ReflectionModel::Specular;
    else if (s == "diffuse") m.spectrum.reflections = ReflectionModel::Diffuse;
    else r.fail(n["reflections"].Mark(), "mechanism.reflections", "expected specular or diffuse");
  }
}

}  // namespace detail

/// Parses a YAML (or JSON manifest) document. `source` names the input in error messages.
inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  detail::YamlReader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    r.fail(e.mark, "syntax", e.msg);
  }
  if (root.IsMap() && root["config"]) root = root["config"];  // a run manifest
  if (!root.IsMap()) r.fail(root.Mark(), "config", "expected a mapping at top level");
  r.check_keys(root, "", {"name", "seed", "output_dir", "system", "sweep", "modes", "simulation", "mechanism", "pkd_cells", "profile_dumps"});

  ExperimentConfig cfg;
  if (root["name"]) cfg.name = r.get<std::string>(root["name"], "name");
  if (root["seed"]) cfg.seed = r.get<std::uint64_t>(root["seed"], "seed");
  if (root["output_dir"]) cfg.output_dir = r.get<std::string>(root["output_dir"], "output_dir");
  if (root["pkd_cells"]) cfg.pkd_cells = r.get<std::size_t>(root["pkd_cells"], "pkd_cells");
  if (root["profile_dumps"]) cfg.profile_dumps = r.get<std::size_t>(root["profile_dumps"], "profile_dumps");
  if (root["system"]) detail::read_system(r, root["system"], cfg.system);
  cfg.simulation.mechanism = mechanism_params(cfg.system);
  if (root["simulation"]) detail::read_simulation(r, root["simulation"], cfg.simulation);
  if (root["mechanism"]) detail::read_mechanism(r, root["mechanism"], cfg.simulation.mechanism);
  if (root["modes"]) {
    const auto& m = root["modes"];
    if (!m.IsSequence()) r.fail(m.Mark(), "modes", "expected a list");
    cfg.modes.clear();
    for (const auto& item : m) {
      const auto s = r.get<std::string>(item, "modes");
      if (!find_mode(s)) r.fail(item.Mark(), "modes", "unknown mode '" + s + "'");
      cfg.modes.push_back(s);
    }
  }
  if (const auto& s = root["sweep"]) {
    r.check_keys(s, "sweep", {"axis", "grid", "range", "gamma_db"});
    if (s["axis"]) {
      try {
        cfg.axis = parse_axis(r.get<std::string>(s["axis"], "sweep.axis"));
      } catch (const InvalidArgument& e) {
        r.fail(s["axis"].Mark(), "sweep.axis", e.what());
      }
    }
    if (s["gamma_db"]) cfg.gamma_db = r.get<double>(s["gamma_db"], "sweep.gamma_db");
    if (s["grid"] && s["range"]) r.fail(s["range"].Mark(), "sweep.range", "give either grid or range, not both");
    if (s["grid"]) {
      if (!s["grid"].IsSequence()) r.fail(s["grid"].Mark(), "sweep.grid", "expected a list");
      for (const auto& v : s["grid"]) cfg.grid.push_back(r.get<double>(v, "sweep.grid"));
    } else if (const auto& g = s["range"]) {
      r.check_keys(g, "sweep.range", {"start", "stop", "step"});
      if (!g["start"] || !g["stop"] || !g["step"]) r.fail(g.Mark(), "sweep.range", "needs start, stop and step");
      try {
        cfg.grid = linear_grid(r.get<double>(g["start"], "sweep.range"), r.get<double>(g["stop"], "sweep.range"),
                               r.get<double>(g["step"], "sweep.range"));
      } catch (const InvalidArgument& e) {
        r.fail(g.Mark(), "sweep.range", e.what());
      }
    }
  }
  if (!root["sweep"]) r.fail(root.Mark(), "sweep", "missing section");

  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    r.fail_validation(e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace hd2d
