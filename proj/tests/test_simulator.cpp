#include <gtest/gtest.h>

#include <cmath>

#include "hd2d/simulator.hpp"

using namespace hd2d;

namespace {

constexpr double kPkd = 0.2;

SimConfig config(SimMode mode, std::size_t iterations, std::uint64_t seed = 1) {
  SimConfig c;
  c.mode = mode;
  c.iterations = iterations;
  c.root_seed = seed;
  c.threads = 1;
  return c;
}

double fraction(std::span<const SinrSample> s, double gamma_db, bool only_accessed = false) {
  std::size_t n = 0, k = 0;
  for (const auto& x : s) {
    if (only_accessed && !x.accessed) continue;
    ++n;
    k += x.sinr >= db_to_linear(gamma_db);
  }
  return n ? static_cast<double>(k) / static_cast<double>(n) : 0.0;
}

}  // namespace

TEST(DrawRealization, Invariants) {
  SystemParams p;
  auto cfg = config(SimMode::HybridMechanism, 1);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto net = draw_realization(p, cfg, rng);
    EXPECT_NEAR(norm(net.test_tx), p.d0_m, 1e-9);
    EXPECT_FALSE(net.blockages.covers({0, 0}));
    EXPECT_FALSE(net.blockages.covers(net.test_tx));
    for (const auto& d : net.dts) {
      EXPECT_LE(std::fabs(d.x), cfg.window_half_width);
      EXPECT_LE(std::fabs(d.y), cfg.window_half_width);
    }
  }
  cfg.mode = SimMode::HybridOracle;
  Rng rng(3);
  EXPECT_TRUE(draw_realization(p, cfg, rng).blockages.empty());
}

TEST(SimulateMmwIteration, NoInterferersGivesSnrTimesFade) {
  SystemParams p;
  p.dt_density_per_km2 = 0.0;
  const auto cfg = config(SimMode::MmwOnly, 1);
  Rng rng(42);
  const auto net = draw_realization(p, cfg, rng);
  Rng a(9), b(9);
  const auto s = simulate_mmw_iteration(p, cfg, net, true, a);
  const double h0 = sample_rayleigh_gain(b);
  EXPECT_EQ(s.interference, 0.0);
  EXPECT_NEAR(s.sinr / h0, 0.729399743837, 1e-9);
}

TEST(SectoredGain, ClassFrequencies) {
  const AntennaPattern pat{db_to_linear(10), db_to_linear(-10), deg_to_rad(30)};
  Rng rng(5);
  constexpr int n = 100'000;
  int mm = 0, ms = 0, ss = 0;
  for (int i = 0; i < n; ++i) {
    const double g = sectored_gain(pat, uniform(rng, 0, kTwoPi), 0.3, uniform(rng, 0, kTwoPi));
    if (std::fabs(g - 100.0) < 1e-9) ++mm;
    else if (std::fabs(g - 1.0) < 1e-9) ++ms;
    else if (std::fabs(g - 0.01) < 1e-12) ++ss;
  }
  EXPECT_EQ(mm + ms + ss, n);
  EXPECT_NEAR(mm / double(n), 1.0 / 144, 0.005);
  EXPECT_NEAR(ms / double(n), 22.0 / 144, 0.005);
  EXPECT_NEAR(ss / double(n), 121.0 / 144, 0.005);
}

TEST(AlohaThin, KeepsExpectedFraction) {
  Rng rng(8);
  std::size_t before = 0, after = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto pts = sample_ppp(50e-6, 1000.0, rng);
    before += pts.size();
    after += aloha_thin(pts, 0.3, rng).size();
  }
  EXPECT_NEAR(static_cast<double>(after) / static_cast<double>(before), 0.3, 0.3 * 0.02);
  EXPECT_TRUE(aloha_thin(std::vector<Point2D>{{1, 1}}, 0.0, rng).empty());
}

TEST(SimulateSamples, MmwMatchesAnalyticAtZeroDb) {
  SystemParams p;
  const auto s = simulate_samples(p, config(SimMode::MmwOnly, 3000), kPkd);
  EXPECT_NEAR(fraction(s, 0.0), coverage_mmw(make_mmw_scenario(p, 1.0), false), 0.03);
}

TEST(SimulateSamples, MeanRadiusAccessMatchesAvailability) {
  SystemParams p;
  auto cfg = config(SimMode::UwOnly, 2000);
  cfg.window_half_width = 3000.0;
  const auto s = simulate_samples(p, cfg, kPkd);
  std::size_t acc = 0;
  for (const auto& x : s) acc += x.accessed;
  const double radius = mean_threshold_radius(p.bs_power_w(), p.tau_w(), p.alpha_uw);
  EXPECT_NEAR(acc / double(s.size()), availability(p.bs_density(), kPkd, radius), 0.03);
}

TEST(SimulateSamples, PerRealizationSensingRuns) {
  SystemParams p;
  auto cfg = config(SimMode::UwOnly, 200);
  cfg.window_half_width = 3000.0;
  cfg.sensing = SensingModel::PerRealization;
  const auto s = simulate_samples(p, cfg, kPkd);
  std::size_t acc = 0;
  for (const auto& x : s) acc += x.accessed;
  const double f = acc / double(s.size());
  EXPECT_GT(f, 0.3);
  EXPECT_LT(f, 0.7);
}

TEST(SimulateSamples, UwConditionalCoverageMatchesAnalytic) {
  SystemParams p;
  auto cfg = config(SimMode::UwOnly, 3000);
  const auto s = simulate_samples(p, cfg, kPkd);
  for (double g : {-35.0, -30.0, -25.0}) {
    const double analytic = coverage_uw(make_uw_scenario(p, db_to_linear(g), kPkd));
    EXPECT_NEAR(fraction(s, g, true), analytic, 0.03) << g;
  }
}

TEST(SimulateSamples, NoBlockageOracleEqualsMmwOnly) {
  SystemParams p;
  p.beta_per_m = 0.0;
  const auto a = simulate_samples(p, config(SimMode::HybridOracle, 300), kPkd);
  const auto b = simulate_samples(p, config(SimMode::MmwOnly, 300), kPkd);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].sinr, b[i].sinr);
}

TEST(SimulateSamples, MechanismTracksOracle) {
  SystemParams p;
  const auto mech = simulate_samples(p, config(SimMode::HybridMechanism, 1000), kPkd);
  const auto orac = simulate_samples(p, config(SimMode::HybridOracle, 1000), kPkd);
  EXPECT_NEAR(fraction(mech, 0.0), fraction(orac, 0.0), 0.05);
}

TEST(SimulateSamples, DeterministicAcrossThreadCounts) {
  SystemParams p;
  auto one = config(SimMode::HybridOracle, 200, 77);
  auto three = one;
  three.threads = 3;
  const auto a = simulate_samples(p, one, kPkd);
  const auto b = simulate_samples(p, three, kPkd);
  const auto c = simulate_samples(p, one, kPkd);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].sinr, b[i].sinr);
    EXPECT_EQ(a[i].sinr, c[i].sinr);
  }
  const auto d = simulate_samples(p, config(SimMode::HybridOracle, 200, 78), kPkd);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i].sinr == d[i].sinr;
  EXPECT_LT(same, a.size());
}

TEST(SimulateHybrid, CurveIsMonotoneAndTracksAnalytic) {
  SystemParams p;
  std::vector<double> grid;
  for (double g = -10; g <= 20; g += 5) grid.push_back(g);
  auto cfg = config(SimMode::HybridOracle, 3000);
  cfg.deferral = DeferralPolicy::ConditionOnAccess;
  const auto c = simulate_hybrid(p, cfg, kPkd, Axis::SinrThresholdDb, grid);
  ASSERT_EQ(c.points.size(), grid.size());
  EXPECT_EQ(c.source, CurveSource::MonteCarlo);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) {
      EXPECT_LE(c.points[i].probability, c.points[i - 1].probability);
    }
    EXPECT_GT(c.points[i].ci_halfwidth, 0.0);
    EXPECT_NEAR(c.points[i].probability, sinr_coverage(p, kPkd, db_to_linear(grid[i]), Band::Hybrid), 0.03) << grid[i];
  }
}

TEST(SimulateHybrid, DistanceAxisRunsPerPoint) {
  SystemParams p;
  const std::vector<double> grid{20, 60};
  const auto c = simulate_hybrid(p, config(SimMode::MmwOnly, 300), kPkd, Axis::DistanceM, grid, 0.0);
  ASSERT_EQ(c.points.size(), 2u);
  EXPECT_EQ(c.points[0].x, 20.0);
  EXPECT_GT(c.points[0].probability, c.points[1].probability);
}

TEST(CoverageFromSamples, DeferralPolicies) {
  const std::vector<SinrSample> s{{2.0, Band::MicroWave, false, 0, true}, {0.0, Band::MicroWave, false, 0, false}};
  const std::vector<double> grid{0.0};
  SystemParams p;
  auto cfg = config(SimMode::UwOnly, 1);
  EXPECT_EQ(coverage_from_samples(s, Axis::SinrThresholdDb, grid, p, cfg).points[0].probability, 0.5);
  cfg.deferral = DeferralPolicy::ConditionOnAccess;
  EXPECT_EQ(coverage_from_samples(s, Axis::SinrThresholdDb, grid, p, cfg).points[0].probability, 1.0);
  const std::vector<SinrSample> none{{0.0, Band::MicroWave, false, 0, false}};
  EXPECT_TRUE(coverage_from_samples(none, Axis::SinrThresholdDb, grid, p, cfg).points[0].failed);
}

TEST(CoverageFromSamples, RateUsesBandBandwidth) {
  // SINR 1: 1 Gbps on mmW, 100 Mbps on uW.
  const std::vector<SinrSample> s{{1.0, Band::MmWave, true, 0, true}, {1.0, Band::MicroWave, false, 0, true}};
  const std::vector<double> grid{1e8, 5e8};
  const auto c = coverage_from_samples(s, Axis::RateBps, grid, SystemParams{}, config(SimMode::HybridOracle, 1));
  EXPECT_EQ(c.points[0].probability, 1.0);
  EXPECT_EQ(c.points[1].probability, 0.5);
}

TEST(EmpiricalLaplace, Basics) {
  const std::vector<double> zeros(50, 0.0);
  EXPECT_EQ(empirical_laplace(zeros, 3.0).value, 1.0);
  const std::vector<double> v{1.0, 2.0, 3.0};
  EXPECT_EQ(empirical_laplace(v, 0.0).value, 1.0);
  EXPECT_NEAR(empirical_laplace(v, 1.0).value, (std::exp(-1.0) + std::exp(-2.0) + std::exp(-3.0)) / 3.0, 1e-15);
  EXPECT_THROW(empirical_laplace(std::vector<double>{}, 1.0), InvalidArgument);
}

TEST(EmpiricalLaplace, MmwMatchesQuadrature) {
  SystemParams p;
  auto cfg = config(SimMode::MmwOnly, 4000);
  cfg.window_half_width = 2000.0;
  const auto sc = make_mmw_scenario(p, 1.0);
  const auto samples = sample_interference(p, cfg, kPkd, InterferenceKind::Mmw);
  const auto e = empirical_laplace(samples, sc.epsilon_l());
  const double q = laplace_mmw_interference(sc, sc.epsilon_l()).value;
  EXPECT_NEAR(e.value / q, 1.0, 0.02);
  EXPECT_GT(e.ci_halfwidth, 0.0);
}
