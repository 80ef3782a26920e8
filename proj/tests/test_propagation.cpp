#include <gtest/gtest.h>

#include <cmath>

#include "hd2d/propagation.hpp"
#include "hd2d/system_params.hpp"

using namespace hd2d;

// Reference values computed at 30 digits from (c / 4 pi f)^2 with c = 299792458 m/s.
constexpr double kC28 = 7.25948170554011539e-07;
constexpr double kC2 = 1.42285841428586262e-04;

TEST(PathlossConstant, Examples) {
  EXPECT_NEAR(pathloss_constant(28e9), kC28, 1e-20);
  EXPECT_NEAR(pathloss_constant(2e9), kC2, 1e-17);
  EXPECT_NEAR(linear_to_db(pathloss_constant(28e9)), -61.39, 0.01);
  EXPECT_NEAR(pathloss_constant(4 * 7e9) * 16.0, pathloss_constant(7e9), 1e-18);
  EXPECT_THROW(pathloss_constant(0.0), InvalidArgument);
}

TEST(PathLoss, Examples) {
  EXPECT_EQ(path_loss(1.0, 3.3, 0.25), 0.25);
  EXPECT_NEAR(path_loss(50.0, 2.0, kC28), 2.90379268221604630e-10, 1e-22);
  EXPECT_NEAR(linear_to_db(path_loss(50.0, 2.0, kC28)), -95.37, 0.01);
  EXPECT_NEAR(path_loss(50.0, 4.0, kC2), 2.27657346285738019e-11, 1e-23);
  EXPECT_THROW(path_loss(0.0, 2.0, kC2), InvalidArgument);
}

TEST(PathLoss, DecreasingInDistanceAndExponent) {
  for (double d = 1.5; d < 500.0; d *= 1.7) {
    EXPECT_LT(path_loss(d * 1.01, 3.0, kC2), path_loss(d, 3.0, kC2));
    EXPECT_LT(path_loss(d, 3.5, kC2), path_loss(d, 3.0, kC2));
  }
}

TEST(NoisePower, Examples) {
  EXPECT_NEAR(watts_to_dbm(noise_power(1e9)), -74.0, 1e-12);
  EXPECT_NEAR(noise_power(1e9), 3.98107170553497251e-11, 1e-24);
  EXPECT_NEAR(watts_to_dbm(noise_power(0.1e9)), -84.0, 1e-12);
  EXPECT_NEAR(watts_to_dbm(noise_power(2e6)) - watts_to_dbm(noise_power(1e6)), 3.0103, 1e-4);
}

TEST(Units, RoundTrip) {
  for (double dbm : {-174.0, -85.0, 0.0, 37.0, 60.0}) EXPECT_NEAR(watts_to_dbm(dbm_to_watts(dbm)), dbm, 1e-12);
  for (double w : {1e-15, 3.16e-12, 1e-3, 5.0})
    EXPECT_NEAR(dbm_to_watts(watts_to_dbm(w)) / w, 1.0, 1e-12);
}

TEST(GainDistribution, TableValues) {
  const auto g = gain_distribution({db_to_linear(10), db_to_linear(-10), deg_to_rad(30)});
  EXPECT_NEAR(g.gains[0], 100.0, 1e-12);
  EXPECT_NEAR(g.gains[1], 1.0, 1e-14);
  EXPECT_NEAR(g.gains[2], 0.01, 1e-16);
  EXPECT_NEAR(g.probabilities[0], 1.0 / 144, 1e-15);
  EXPECT_NEAR(g.probabilities[1], 22.0 / 144, 1e-15);
  EXPECT_NEAR(g.probabilities[2], 121.0 / 144, 1e-15);
}

TEST(GainDistribution, Omnidirectional) {
  const auto g = gain_distribution({10.0, 0.1, kTwoPi});
  EXPECT_EQ(g.probabilities[0], 1.0);
  EXPECT_EQ(g.probabilities[1], 0.0);
  EXPECT_EQ(g.probabilities[2], 0.0);
}

TEST(GainDistribution, AlwaysAValidDistribution) {
  for (double th = 0.01; th < kTwoPi; th += 0.05) {
    const auto g = gain_distribution({10.0, 0.1, th});
    EXPECT_NEAR(g.probabilities[0] + g.probabilities[1] + g.probabilities[2], 1.0, 1e-14);
    EXPECT_GE(g.gains[0], g.gains[1]);
    EXPECT_GE(g.gains[1], g.gains[2]);
  }
}

TEST(GainDistribution, RejectsBadPattern) {
  EXPECT_THROW(gain_distribution({0.1, 10.0, 1.0}), InvalidArgument);
  EXPECT_THROW(gain_distribution({10.0, 0.1, 0.0}), InvalidArgument);
}

TEST(RayleighGain, Moments) {
  Rng rng(2024);
  constexpr int n = 1'000'000;
  double sum = 0.0, root4 = 0.0;
  int above = 0;
  for (int i = 0; i < n; ++i) {
    const double h = sample_rayleigh_gain(rng);
    sum += h;
    root4 += std::pow(h, 0.25);
    above += h > 1.0;
  }
  EXPECT_GE(sum / n, 0.997);
  EXPECT_LE(sum / n, 1.003);
  EXPECT_NEAR(static_cast<double>(above) / n, std::exp(-1.0), 0.002);
  EXPECT_NEAR(root4 / n, 0.906402477055477, 0.002);
}

TEST(SystemParams, DefaultsAndValidation) {
  const SystemParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_NEAR(watts_to_dbm(p.mmw_band().noise_power), -74.0, 1e-12);
  EXPECT_NEAR(watts_to_dbm(p.uw_band().noise_power), -84.0, 1e-12);
  SystemParams bad = p;
  bad.dt_density_per_km2 = -1.0;
  try {
    bad.validate();
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("dt_density_per_km2"), std::string::npos);
  }
}
