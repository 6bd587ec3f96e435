#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "proxauth/sim/simulator.hpp"
#include "fixtures.hpp"

namespace proxauth::sim {
namespace {

PathLossConfig noiseless() {
  PathLossConfig cfg;
  cfg.noise_sigma_dbm = 0.0;
  return cfg;
}

TEST(RssiAtDistance, ReferenceDistanceGivesP0) {
  Rng rng(1);
  EXPECT_EQ(rssi_at_distance(noiseless(), 1.0, rng), -40);
}

TEST(RssiAtDistance, TenMetersAtExponent2_5) {
  Rng rng(1);
  EXPECT_EQ(rssi_at_distance(noiseless(), 10.0, rng), -65);
}

TEST(RssiAtDistance, ClampsAtFloor) {
  Rng rng(1);
  // -40 - 25 * 3 = -115 before clamping.
  EXPECT_EQ(rssi_at_distance(noiseless(), 1000.0, rng), -100);
}

TEST(RssiAtDistance, NonPositiveDistanceRejected) {
  Rng rng(1);
  for (double d : {0.0, -1.0, std::nan(""), static_cast<double>(INFINITY)}) {
    try {
      rssi_at_distance(noiseless(), d, rng);
      FAIL() << d;
    } catch (const SimError& e) {
      EXPECT_EQ(e.code(), "NonPositiveDistance");
    }
  }
}

TEST(RssiAtDistance, NoiselessDrawsNothing) {
  Rng a(5), b(5);
  rssi_at_distance(noiseless(), 3.0, a);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RssiAtDistanceProperty, NoiselessIsNonIncreasing) {
  Rng rng(2);
  const auto cfg = noiseless();
  for (int i = 0; i < 1000; ++i) {
    double d1 = rng.uniform(0.01, 60.0);
    double d2 = rng.uniform(0.01, 60.0);
    if (d1 > d2) std::swap(d1, d2);
    EXPECT_GE(rssi_at_distance(cfg, d1, rng), rssi_at_distance(cfg, d2, rng)) << d1 << " " << d2;
  }
}

TEST(RssiAtDistanceProperty, NoiseStatistics) {
  Rng rng(3);
  const PathLossConfig cfg;  // sigma 2
  const double d = 4.0;
  const double expected = -40.0 - 25.0 * std::log10(d);
  double sum = 0, sum_sq = 0;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) {
    const double v = rssi_at_distance(cfg, d, rng);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1));
  EXPECT_NEAR(mean, expected, 0.2);
  EXPECT_GE(sd, 1.6);
  EXPECT_LE(sd, 2.4);
}

TEST(Scenario, SeparationsAvoidGrayArea) {
  Rng rng(4);
  for (int i = 0; i < 5000; ++i) {
    const double near = Scenario::authentic().draw_separation(rng);
    const double far = Scenario::unauthorized().draw_separation(rng);
    EXPECT_GT(near, 0.1);
    EXPECT_LE(near, kAuthenticMaxM);
    EXPECT_GE(far, kUnauthorizedMinM);
    EXPECT_LE(far, 10.0);
  }
}

TEST(Scenario, InvalidBandRejected) {
  EXPECT_THROW((Scenario{ScenarioKind::Authentic, 2.0, 1.0}.validate()), SimError);
  EXPECT_THROW((Scenario{ScenarioKind::Authentic, 0.0, 1.0}.validate()), SimError);
}

TEST(PlaceAccessPoints, DeterministicNamesAndFrequencies) {
  EnvironmentConfig env;
  Rng rng(6);
  const auto layout = place_access_points(env, 2, rng);
  ASSERT_EQ(layout.aps.size(), 10u);
  EXPECT_EQ(layout.location_tag, "loc-03");
  EXPECT_EQ(layout.aps[0].ssid, "AP-01");
  EXPECT_EQ(layout.aps[9].ssid, "AP-10");
  EXPECT_EQ(layout.aps[6].frequency_hz, 2437000000);
  std::set<std::string> bssids;
  for (const auto& ap : layout.aps) {
    bssids.insert(ap.bssid.to_string());
    EXPECT_GE(ap.position.x, 0.0);
    EXPECT_LT(ap.position.x, env.area_m);
  }
  EXPECT_EQ(bssids.size(), 10u);
}

TEST(GenerateSession, SingleApAtCenterSeenByBothDevices) {
  EnvironmentConfig env;
  env.n_aps = 1;
  env.area_m = 10.0;
  Layout layout{"loc-01", {AccessPoint{"AP-01", {}, 2412000000, {5.0, 5.0}}}};
  Rng rng(7);
  const auto s = generate_session(layout, env, noiseless(), Scenario::authentic(), rng, 1000);
  ASSERT_EQ(s.mobile.observations.size(), 1u);
  ASSERT_EQ(s.login.observations.size(), 1u);
  EXPECT_EQ(s.mobile.observations[0].ssid, "AP-01");
  EXPECT_EQ(s.true_label, Label::Authentic);
  EXPECT_NEAR(distance(s.mobile_position, s.login_position), s.separation_m, 1e-9);
  EXPECT_EQ(s.mobile.observations[0].rssi_dbm,
            rssi_at_distance(noiseless(), distance(s.mobile_position, {5, 5}), rng));
  EXPECT_EQ(s.mobile.timestamp_ms, 1000);
  EXPECT_GE(s.login.timestamp_ms, 1000);
  EXPECT_LT(s.login.timestamp_ms, 2000);
}

TEST(GenerateSession, NothingVisibleIsConfigurationError) {
  EnvironmentConfig env;
  env.n_aps = 1;
  env.area_m = 10.0;
  env.detection_radius_m = 0.001;
  Layout layout{"loc-01", {AccessPoint{"AP-01", {}, 2412000000, {5.0, 5.0}}}};
  Rng rng(8);
  EXPECT_THROW(generate_session(layout, env, noiseless(), Scenario::authentic(), rng), SimError);
  try {
    generate_session_retrying(layout, env, noiseless(), Scenario::authentic(), rng);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), "ConfigurationError");
  }
}

TEST(Configs, ValidationRejectsBadValues) {
  PathLossConfig loss;
  loss.d0_m = 0;
  EXPECT_THROW(loss.validate(), SimError);
  loss = {};
  loss.noise_sigma_dbm = -1;
  EXPECT_THROW(loss.validate(), SimError);
  EnvironmentConfig env;
  env.n_aps = 0;
  EXPECT_THROW(env.validate(), SimError);
  env = {};
  env.frequency_set.clear();
  EXPECT_THROW(env.validate(), SimError);
  DatasetPlan plan;
  plan.locations = 0;
  try {
    generate_dataset(plan);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), "ConfigurationError");
  }
}

TEST(GenerateDataset, PublishedShapeWithinTenPercent) {
  DatasetPlan plan;
  plan.seed = 1;
  plan.n_sessions_per_class = sessions_for_rows(plan, 4825);
  const auto d = generate_dataset(plan);
  EXPECT_GE(d.size(), 4825u * 9 / 10);
  EXPECT_LE(d.size(), 4825u * 11 / 10);
  EXPECT_TRUE(d.label_counts().balanced());
  EXPECT_EQ(d.provenance, Provenance::Simulated);
  std::set<std::string> tags;
  for (const auto& s : d.samples) tags.insert(s.location_tag);
  EXPECT_GE(tags.size(), 3u);
}

TEST(GenerateDataset, SameSeedSameDataset) {
  DatasetPlan plan;
  plan.n_sessions_per_class = 20;
  plan.seed = 9;
  EXPECT_EQ(generate_dataset(plan).samples, generate_dataset(plan).samples);
  auto other = plan;
  other.seed = 10;
  EXPECT_NE(generate_dataset(plan).samples, generate_dataset(other).samples);
}

TEST(GenerateDataset, PrefixIsStableAsSessionsGrow) {
  DatasetPlan plan;
  plan.seed = 12;
  plan.n_sessions_per_class = 5;
  const auto small = generate_dataset(plan);
  plan.n_sessions_per_class = 8;
  const auto big = generate_dataset(plan);
  ASSERT_GT(big.size(), small.size());
  EXPECT_TRUE(std::equal(small.samples.begin(), small.samples.end(), big.samples.begin()));
}

TEST(SessionsForRows, IsSmallestSufficientCount) {
  DatasetPlan plan;
  plan.seed = 13;
  const auto k = sessions_for_rows(plan, 600);
  plan.n_sessions_per_class = k;
  EXPECT_GE(generate_dataset(plan).size(), 600u);
  plan.n_sessions_per_class = k - 1;
  EXPECT_LT(generate_dataset(plan).size(), 600u);
}

TEST(GenerateDatasetProperty, SamplesSatisfyBeaconInvariants) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    DatasetPlan plan;
    plan.seed = rng.next_u64();
    plan.n_sessions_per_class = 1 + rng.below(10);
    plan.locations = 1 + rng.below(4);
    plan.env.n_aps = 1 + rng.below(12);
    plan.loss.noise_sigma_dbm = rng.uniform(0.0, 6.0);
    const auto d = generate_dataset(plan);
    for (const auto& s : d.samples) {
      EXPECT_NO_THROW(s.observation.validate());
      EXPECT_LE(s.observation.rssi_dbm, 0);
      EXPECT_GT(s.observation.frequency_hz, 0);
      EXPECT_FALSE(s.observation.ssid.empty());
    }
  }
}

TEST(GenerateDatasetProperty, CsvRoundTrip) {
  DatasetPlan plan;
  plan.seed = 15;
  plan.n_sessions_per_class = 10;
  const auto d = generate_dataset(plan);
  std::ostringstream out;
  write_dataset_csv(out, d);
  std::istringstream in(out.str());
  const auto back = parse_dataset_csv(in);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.samples[i].observation.ssid, d.samples[i].observation.ssid);
    EXPECT_EQ(back.samples[i].observation.rssi_dbm, d.samples[i].observation.rssi_dbm);
    EXPECT_EQ(back.samples[i].label, d.samples[i].label);
    EXPECT_EQ(back.samples[i].role, d.samples[i].role);
  }
}

TEST(PlanJson, OverridesApplyAndMetadataRecordsSeed) {
  const auto plan = plan_from_json(
      {{"environment", {{"n_aps", 4}}}, {"path_loss", {{"exponent_n", 3.0}}}, {"locations", 2}});
  EXPECT_EQ(plan.env.n_aps, 4u);
  EXPECT_EQ(plan.loss.exponent_n, 3.0);
  EXPECT_EQ(plan.loss.p0_dbm, -40.0);
  EXPECT_EQ(plan.locations, 2u);
  EXPECT_EQ(path_loss_from_json(to_json(plan.loss)).exponent_n, 3.0);
  EXPECT_EQ(environment_from_json(to_json(plan.env)).n_aps, 4u);
}

}  // namespace
}  // namespace proxauth::sim
