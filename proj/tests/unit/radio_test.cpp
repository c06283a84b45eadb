#include "twinsim/radio.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twinsim/errors.hpp"
#include "twinsim/random.hpp"

using namespace twinsim;

TEST(MakeEnvironment, PresetTriples) {
  const Rect region = Rect::centered({0, 0}, 3000, 3000);
  const auto rural = make_environment(Area::Rural, region);
  const auto suburban = make_environment(Area::Suburban, region);
  const auto urban = make_environment(Area::Urban, region);
  EXPECT_EQ(rural.carrier_freq_ghz, 0.7);
  EXPECT_EQ(rural.inter_site_distance_m, 2900.0);
  EXPECT_EQ(suburban.carrier_freq_ghz, 1.8);
  EXPECT_EQ(suburban.inter_site_distance_m, 900.0);
  EXPECT_EQ(urban.carrier_freq_ghz, 2.5);
  EXPECT_EQ(urban.inter_site_distance_m, 440.0);
  for (const auto* env : {&rural, &suburban, &urban}) EXPECT_EQ(env->mimo_streams, 2);
}

TEST(MakeEnvironment, RuralGrid) {
  const auto env = make_environment(Area::Rural, {0, 0, 6000, 6000});
  EXPECT_GE(env.stations.size(), 4u);
  EXPECT_EQ(env.stations.size(), 9u);
  const Vec2 c{3000, 3000};
  EXPECT_TRUE(std::find(env.stations.begin(), env.stations.end(), c) != env.stations.end());
  for (const Vec2& s : env.stations) {
    EXPECT_TRUE(env.region.contains(s));
    const double kx = (s.x - c.x) / 2900.0;
    EXPECT_DOUBLE_EQ(kx, std::round(kx));
  }
}

TEST(MakeEnvironment, UrbanSingleCell) {
  const auto env = make_environment(Area::Urban, {0, 0, 440, 440});
  ASSERT_EQ(env.stations.size(), 1u);
  EXPECT_EQ(env.stations[0], (Vec2{220, 220}));
}

TEST(MakeEnvironment, SuburbanSpacing) {
  const auto env = make_environment(Area::Suburban, {0, 0, 1800, 1800});
  EXPECT_EQ(env.inter_site_distance_m, 900.0);
  ASSERT_EQ(env.stations.size(), 9u);
  EXPECT_EQ(env.stations[1].x - env.stations[0].x, 900.0);
}

TEST(MakeEnvironment, TinyRegionKeepsCenterStation) {
  const auto env = make_environment(Area::Rural, {0, 0, 10, 10});
  ASSERT_EQ(env.stations.size(), 1u);
  EXPECT_EQ(env.stations[0], (Vec2{5, 5}));
}

TEST(MakeEnvironment, InvalidInputs) {
  EXPECT_THROW(make_environment(Area::Urban, {0, 0, 0, 100}), InvalidInput);
  RadioOverrides bad;
  bad.bandwidth_mhz = -5.0;
  EXPECT_THROW(make_environment(Area::Urban, {0, 0, 100, 100}, bad), InvalidInput);
  RadioOverrides nan;
  nan.tx_power_dbm = NAN;
  EXPECT_THROW(make_environment(Area::Urban, {0, 0, 100, 100}, nan), InvalidInput);
  RadioOverrides streams;
  streams.mimo_streams = 0;
  EXPECT_THROW(make_environment(Area::Urban, {0, 0, 100, 100}, streams), InvalidInput);
}

TEST(PathLoss, FreeSpaceAnchor) {
  EXPECT_NEAR(path_loss_db(0.7, 1000.0, 2.0), 89.34, 0.005);
  EXPECT_NEAR(path_loss_db(2.5, 1000.0, 2.0), 100.40, 0.005);
}

TEST(PathLoss, DoublingDistance) {
  EXPECT_NEAR(path_loss_db(1.8, 600.0, 2.0) - path_loss_db(1.8, 300.0, 2.0),
              20.0 * std::log10(2.0), 1e-12);
  EXPECT_NEAR(20.0 * std::log10(2.0), 6.02, 0.001);
}

TEST(PathLoss, ClampsShortDistances) {
  EXPECT_EQ(path_loss_db(2.5, 0.0, 3.0), path_loss_db(2.5, 10.0, 3.0));
  EXPECT_EQ(path_loss_db(2.5, 3.0, 3.0), path_loss_db(2.5, 10.0, 3.0));
}

TEST(PathLoss, RejectsBadFrequency) {
  EXPECT_THROW(path_loss_db(0.0, 100.0, 2.0), InvalidInput);
  EXPECT_THROW(path_loss_db(-1.0, 100.0, 2.0), InvalidInput);
}

namespace {

RadioEnvironment single_station(Area area = Area::Urban) {
  return make_environment(area, Rect::centered({0, 0}, 100, 100));
}

}  // namespace

TEST(LinkThroughput, UnitSnrGivesShannonValue) {
  RadioEnvironment env = single_station();
  env.bandwidth_mhz = 20.0;
  env.mimo_streams = 2;
  env.se_cap = 100.0;
  const double d = 500.0;
  // Choose tx power so SNR is exactly 0 dB at distance d.
  env.tx_power_dbm = path_loss_db(env.carrier_freq_ghz, d, env.path_loss_exponent) +
                     noise_floor_dbm(env.bandwidth_mhz, env.noise_figure_db);
  EXPECT_NEAR(link_throughput(env, {d, 0}, 1), 40.0, 1e-9);
}

TEST(LinkThroughput, EqualShareExact) {
  Rng rng(17);
  const auto env = make_environment(Area::Suburban, Rect::centered({0, 0}, 2700, 2700));
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{rng.uniform(-1500, 1500), rng.uniform(-1500, 1500)};
    const double one = link_throughput(env, p, 1);
    for (std::size_t k = 1; k <= 64; ++k) {
      EXPECT_NEAR(link_throughput(env, p, k) * static_cast<double>(k), one, 1e-9 * one);
    }
  }
  EXPECT_EQ(link_throughput(env, {123, 456}, 2), 0.5 * link_throughput(env, {123, 456}, 1));
}

TEST(LinkThroughput, MonotoneInDistance) {
  RadioEnvironment env = single_station(Area::Rural);
  env.tx_power_dbm = 0.0;  // keep the cap out of the way
  EXPECT_GE(link_throughput(env, {100, 0}, 1), link_throughput(env, {1000, 0}, 1));
  double prev = INFINITY;
  for (double d = 10.0; d < 20000.0; d *= 1.1) {
    const double v = link_throughput(env, {d, 0}, 1);
    EXPECT_LE(v, prev);
    EXPECT_GE(v, 0.0);
    prev = v;
  }
}

TEST(LinkThroughput, Errors) {
  const auto env = single_station();
  EXPECT_THROW(link_throughput(env, {0, 0}, 0), InvalidInput);
  EXPECT_THROW(link_throughput(env, {NAN, 0}, 1), InvalidInput);
  RadioEnvironment nan = env;
  nan.noise_figure_db = NAN;
  EXPECT_THROW(link_throughput(nan, {0, 0}, 1), InvalidInput);
  // Outside the region is still evaluated.
  EXPECT_GE(link_throughput(env, {5000, 5000}, 1), 0.0);
}

TEST(Heatmap, StationCellIsMaximum) {
  RadioEnvironment env = make_environment(Area::Suburban, Rect::centered({0, 0}, 1800, 1800));
  env.tx_power_dbm = -10.0;
  const Heatmap map = heatmap(env, 100.0);
  EXPECT_EQ(map.rows * map.cols, map.values.size());
  const double peak = *std::max_element(map.values.begin(), map.values.end());
  // Cell (9, 9) is centered at (50, 50); pick a map aligned on the station instead.
  const Heatmap aligned = heatmap(make_environment(Area::Urban, Rect::centered({0, 0}, 900, 900)), 100.0);
  const double center = aligned.at(aligned.rows / 2, aligned.cols / 2);
  EXPECT_EQ(center, *std::max_element(aligned.values.begin(), aligned.values.end()));
  for (double v : map.values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, peak);
  }
}

TEST(Heatmap, RotationalSymmetry) {
  RadioEnvironment env = make_environment(Area::Urban, Rect::centered({0, 0}, 440, 440));
  env.tx_power_dbm = -20.0;
  ASSERT_EQ(env.stations.size(), 1u);
  const Heatmap map = heatmap(env, 20.0);
  ASSERT_EQ(map.rows, map.cols);
  const std::size_t n = map.rows;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const double a = map.at(r, c);
      const double b = map.at(c, n - 1 - r);
      EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, a));
    }
}

TEST(Heatmap, OversizedCellGivesSingleCell) {
  const auto env = single_station();
  const Heatmap map = heatmap(env, 1000.0);
  EXPECT_EQ(map.rows, 1u);
  EXPECT_EQ(map.cols, 1u);
  EXPECT_EQ(map.cell_center(0, 0), env.region.center());
  EXPECT_THROW(heatmap(env, 0.0), InvalidInput);
}

TEST(Heatmap, UrbanPeakAboveRural) {
  const auto urban = make_environment(Area::Urban, Rect::centered({0, 0}, 1320, 1320));
  const auto rural = make_environment(Area::Rural, Rect::centered({0, 0}, 8700, 8700));
  const Heatmap u = heatmap(urban, 22.0);
  const Heatmap r = heatmap(rural, 145.0);
  EXPECT_GT(*std::max_element(u.values.begin(), u.values.end()),
            *std::max_element(r.values.begin(), r.values.end()));
}

TEST(Heatmap, CsvLayout) {
  const auto env = single_station();
  std::ostringstream os;
  write_heatmap_csv(heatmap(env, 50.0), os);
  const std::string csv = os.str();
  EXPECT_EQ(csv.rfind("x,y,throughput_mbps\n", 0), 0u);
  EXPECT_NE(csv.find("\n-25.000000,-25.000000,"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}
