#include <gtest/gtest.h>

#include <cmath>

#include "hd2d/analysis_uw.hpp"
#include "hd2d/system_params.hpp"

using namespace hd2d;

namespace {

UwScenario table_scenario(double gamma_db, double pkd = 0.2) {
  return make_uw_scenario(SystemParams{}, db_to_linear(gamma_db), pkd);
}

// Brute force: drop BSs and CUs on a square, assign each CU to its nearest BS by full scan,
// and count BSs whose centre lies in the inner half of the square (edge cells are cut).
double brute_force_pkd(double bs_per_m2, double cu_per_m2, int k, std::uint64_t seed, int rounds) {
  Rng rng(seed);
  const double h = 4000.0;
  long hits = 0, cells = 0;
  for (int r = 0; r < rounds; ++r) {
    const auto bs = sample_ppp(bs_per_m2, h, rng);
    const auto cu = sample_ppp(cu_per_m2, h, rng);
    std::vector<int> load(bs.size(), 0);
    for (const auto& c : cu) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (std::size_t i = 0; i < bs.size(); ++i) {
        const double d = dot(c - bs[i], c - bs[i]);
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      ++load[best];
    }
    for (std::size_t i = 0; i < bs.size(); ++i) {
      if (std::fabs(bs[i].x) > 0.5 * h || std::fabs(bs[i].y) > 0.5 * h) continue;
      ++cells;
      hits += load[i] >= k;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(cells);
}

}  // namespace

TEST(EstimatePkd, NoUsersNeverOccupied) {
  Rng rng(1);
  EXPECT_EQ(estimate_pkd(1e-6, 0.0, 8, rng), 0.0);
}

TEST(EstimatePkd, AgreesWithBruteForceAssociation) {
  Rng rng(7);
  const double est = estimate_pkd(1e-6, 5e-6, 1, rng, 40'000);
  const double brute = brute_force_pkd(1e-6, 5e-6, 1, 99, 1500);
  EXPECT_NEAR(est, brute, 0.01);
}

TEST(EstimatePkd, DecreasingInChannelCount) {
  double prev = 1.0;
  for (int k = 1; k <= 12; ++k) {
    Rng rng(3);  // same cells for every K: nested events
    const double v = estimate_pkd(1e-6, 5e-6, k, rng, 20'000);
    EXPECT_LE(v, prev);
    prev = v;
  }
  Rng rng(3);
  EXPECT_NEAR(estimate_pkd(1e-6, 5e-6, 8, rng, 20'000), 0.21, 0.02);
}

TEST(MeanThresholdRadius, Examples) {
  EXPECT_NEAR(mean_threshold_radius(dbm_to_watts(37), dbm_to_watts(-85), 4.0), 1017.00030628125727, 1e-8);
  EXPECT_NEAR(mean_threshold_radius(2.0, 2.0, 4.0), 0.906402477055477078, 1e-14);
  EXPECT_NEAR(mean_threshold_radius(5.0, 1e-12, 4.0) / mean_threshold_radius(5.0, 1e-8, 4.0), 10.0, 1e-10);
  EXPECT_THROW(mean_threshold_radius(5.0, 0.0, 4.0), InvalidArgument);
}

TEST(Availability, Examples) {
  EXPECT_EQ(availability(1e-6, 0.0, 1017.0), 1.0);
  EXPECT_NEAR(availability(1e-6, 0.2, 1017.00030628125727), 0.522117126372377515, 1e-12);
  const double a = availability(1e-6, 0.2, 1017.0);
  EXPECT_LT(availability(2e-6, 0.2, 1017.0), a);
  EXPECT_LT(availability(1e-6, 0.3, 1017.0), a);
  EXPECT_LT(availability(1e-6, 0.2, 1100.0), a);
}

TEST(LaplaceUwDt, TrivialArguments) {
  auto sc = table_scenario(0);
  sc.gamma = 0.0;
  for (auto m : {LaplaceMethod::ClosedForm, LaplaceMethod::Quadrature}) EXPECT_EQ(laplace_uw_dt(sc, 0.5, m).value, 1.0);
  sc = table_scenario(0);
  sc.dt_density = 0.0;
  for (auto m : {LaplaceMethod::ClosedForm, LaplaceMethod::Quadrature}) EXPECT_EQ(laplace_uw_dt(sc, 0.5, m).value, 1.0);
}

TEST(LaplaceUwDt, QuadratureMatchesShotNoiseResult) {
  // alpha = 4: exp(-p_a lambda pi^2 sqrt(eps_DT) / 2), less the tail beyond 20 km.
  const auto sc = table_scenario(0);
  const double pa = 0.522117126372377515;
  const double full = std::exp(-pa * sc.dt_density * kPi * kPi * std::sqrt(sc.epsilon_dt()) / 2.0);
  EXPECT_NEAR(full, 0.724648845121, 1e-11);
  const double tail = pa * sc.dt_density * kPi * sc.epsilon_dt() / (2.0e4 * 2.0e4);  // integral beyond r_max
  EXPECT_NEAR(laplace_uw_dt(sc, pa, LaplaceMethod::Quadrature).value, full * std::exp(tail), 1e-9);
}

TEST(LaplaceUwDt, VerbatimExponentDiffers) {
  const auto sc = table_scenario(0);
  const double pa = 0.522117126372377515;
  const double verbatim = laplace_uw_dt(sc, pa, LaplaceMethod::ClosedForm).value;
  EXPECT_NEAR(verbatim, std::exp(-pa * sc.dt_density * kPi * kPi * std::pow(sc.epsilon_dt(), 0.25) / 2.0), 1e-15);
  EXPECT_GT(std::fabs(verbatim - laplace_uw_dt(sc, pa, LaplaceMethod::Quadrature).value), 0.1);
}

TEST(LaplaceUwDt, SineZeroNeedsQuadrature) {
  auto sc = table_scenario(0);
  sc.band.alpha_los = sc.band.alpha_nlos = 2.0;
  EXPECT_THROW(laplace_uw_dt(sc, 0.5, LaplaceMethod::ClosedForm), InvalidArgument);
}

TEST(LaplaceUwBs, TrivialArguments) {
  auto sc = table_scenario(0);
  sc.gamma = 0.0;
  EXPECT_EQ(laplace_uw_bs(sc, 0.2, 1017.0, LaplaceMethod::ClosedForm).value, 1.0);
  EXPECT_EQ(laplace_uw_bs(sc, 0.2, 1017.0, LaplaceMethod::Quadrature).value, 1.0);
  sc = table_scenario(0);
  EXPECT_EQ(laplace_uw_bs(sc, 0.0, 1017.0, LaplaceMethod::ClosedForm).value, 1.0);
  EXPECT_EQ(laplace_uw_bs(sc, 0.0, 1017.0, LaplaceMethod::Quadrature).value, 1.0);
}

TEST(LaplaceUwBs, ClosedFormMatchesQuadratureAndReference) {
  const auto sc = table_scenario(0);
  const double radius = threshold_radius(sc);
  const double cf = laplace_uw_bs(sc, 0.2, radius, LaplaceMethod::ClosedForm).value;
  const double q = laplace_uw_bs(sc, 0.2, radius, LaplaceMethod::Quadrature).value;
  EXPECT_NEAR(cf, 0.98132994667, 1e-10);
  EXPECT_NEAR(q / cf, 1.0, 1e-3);
  EXPECT_NEAR(laplace_uw_bs(sc, 0.2, 0.0, LaplaceMethod::ClosedForm).value,
              std::exp(-0.2 * sc.bs_density * kPi * kPi / 2.0 * std::sqrt(sc.epsilon_bs())), 1e-14);
}

TEST(LaplaceUwBs, ClosedFormNeedsAlphaFour) {
  auto sc = table_scenario(0);
  sc.band.alpha_los = sc.band.alpha_nlos = 3.5;
  EXPECT_THROW(laplace_uw_bs(sc, 0.2, 500.0, LaplaceMethod::ClosedForm), InvalidArgument);
  EXPECT_NO_THROW(laplace_uw_bs(sc, 0.2, 500.0, LaplaceMethod::Quadrature));
}

TEST(LaplaceUw, BoundedAndMonotone) {
  double prev_dt = 1.0, prev_bs = 1.0;
  for (double g = -30; g <= 10; g += 2.5) {
    const auto sc = table_scenario(g);
    const double dt = laplace_uw_dt(sc, 0.5, LaplaceMethod::Quadrature).value;
    const double bs = laplace_uw_bs(sc, 0.2, 1017.0, LaplaceMethod::ClosedForm).value;
    EXPECT_GT(dt, 0.0);
    EXPECT_GT(bs, 0.0);
    EXPECT_LE(dt, prev_dt);
    EXPECT_LE(bs, prev_bs);
    prev_dt = dt;
    prev_bs = bs;
  }
}

TEST(CoverageUw, ReferenceValues) {
  // Independent evaluation: exp(-eps sigma^2) times the untruncated PGFL results, p_kd = 0.2.
  // The DT integral stops at 20 km, which restores exp(tail) of the transform.
  const std::pair<double, double> refs[] = {{-10, 2.29288576148e-8}, {-5, 7.99152806757e-25}, {0, 8.06006145748e-77}};
  for (const auto& [g, ref] : refs) {
    const auto sc = table_scenario(g);
    const double tail = 0.522117126372377515 * sc.dt_density * kPi * sc.epsilon_dt() / (2.0e4 * 2.0e4);
    EXPECT_NEAR(coverage_uw(sc) / (ref * std::exp(tail)), 1.0, 1e-8) << g;
  }
}

TEST(CoverageUw, LowThresholdLimit) { EXPECT_NEAR(coverage_uw(table_scenario(-120)), 1.0, 1e-6); }

TEST(CoverageUw, DecreasingInDistance) {
  auto near = table_scenario(-15), far = table_scenario(-15);
  far.d0 = 80.0;
  EXPECT_LT(coverage_uw(far), coverage_uw(near));
}

TEST(CoverageUw, MonotoneInDensities) {
  const auto base = table_scenario(-15);
  const double c0 = coverage_uw(base);
  auto dense_dt = base;
  dense_dt.dt_density *= 2.0;
  EXPECT_LT(coverage_uw(dense_dt), c0);
  // More BSs also lower p_a and silence DTs, so BS density is not monotone; with p_kd = 0
  // the BS term vanishes and coverage cannot depend on it.
  auto idle = base, idle_dense = base;
  idle.pkd = idle_dense.pkd = 0.0;
  idle_dense.bs_density *= 2.0;
  EXPECT_EQ(coverage_uw(idle), coverage_uw(idle_dense));
}

TEST(CoverageUw, ThresholdFlagIncludesPathlossConstant) {
  auto sc = table_scenario(0);
  sc.threshold_includes_pathloss_constant = true;
  EXPECT_NEAR(threshold_radius(sc), 1017.00030628125727 * std::pow(sc.pathloss_c(), 0.25), 1e-9);
}
