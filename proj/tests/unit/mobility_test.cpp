#include "twinsim/mobility.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "twinsim/errors.hpp"
#include "twinsim/radio.hpp"
#include "twinsim/random.hpp"

using namespace twinsim;

namespace {

PathParams params(double duration = 600.0) {
  PathParams p;
  p.region = {0, 0, 1000, 1000};
  p.duration = duration;
  return p;
}

}  // namespace

TEST(GeneratePath, ZeroDurationSingleSample) {
  const auto traj = generate_path(3, params(0.0));
  ASSERT_EQ(traj.samples.size(), 1u);
  EXPECT_EQ(traj.samples[0].t, 0.0);
  EXPECT_TRUE(Rect(params().region).contains(traj.samples[0].position));
}

TEST(GeneratePath, DeterministicPerSeed) {
  const auto a = generate_path(42, params());
  const auto b = generate_path(42, params());
  const auto c = generate_path(43, params());
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].t, b.samples[i].t);
    EXPECT_EQ(a.samples[i].position, b.samples[i].position);
  }
  EXPECT_NE(a.samples[1].position, c.samples[1].position);
}

TEST(GeneratePath, StaysInRegionAndSpeedBounded) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto traj = generate_path(seed, params());
    EXPECT_EQ(traj.samples.front().t, 0.0);
    EXPECT_EQ(traj.samples.back().t, 600.0);
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      EXPECT_TRUE(params().region.contains(traj.samples[i].position));
      if (i == 0) continue;
      const auto& a = traj.samples[i - 1];
      const auto& b = traj.samples[i];
      ASSERT_GT(b.t, a.t);
      const double v = distance(a.position, b.position) / (b.t - a.t);
      EXPECT_GE(v, 8.0 - 1e-6);
      EXPECT_LE(v, 16.0 + 1e-6);
    }
  }
}

TEST(GeneratePath, SamplesAtLeastEveryTimestep) {
  const auto traj = generate_path(5, params(100.0));
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    EXPECT_LE(traj.samples[i].t - traj.samples[i - 1].t, 1.0 + 1e-4);
  }
}

TEST(GeneratePath, InvalidParams) {
  PathParams p = params();
  p.region = {0, 0, 0, 10};
  EXPECT_THROW(generate_path(1, p), InvalidInput);
  p = params(-1.0);
  EXPECT_THROW(generate_path(1, p), InvalidInput);
  p = params();
  p.speed_min = 20.0;
  EXPECT_THROW(generate_path(1, p), InvalidInput);
  p = params();
  p.timestep = 0.0;
  EXPECT_THROW(generate_path(1, p), InvalidInput);
}

TEST(PositionAt, InterpolatesAndClamps) {
  VehicleTrajectory traj;
  traj.samples = {{0.0, {0, 0}}, {2.0, {20, 0}}, {4.0, {20, 10}}};
  EXPECT_EQ(position_at(traj, -1.0), (Vec2{0, 0}));
  EXPECT_EQ(position_at(traj, 1.0), (Vec2{10, 0}));
  EXPECT_EQ(position_at(traj, 2.0), (Vec2{20, 0}));
  EXPECT_EQ(position_at(traj, 3.0), (Vec2{20, 5}));
  EXPECT_EQ(position_at(traj, 9.0), (Vec2{20, 10}));
  EXPECT_THROW(position_at(VehicleTrajectory{}, 0.0), InvalidInput);
}

TEST(Associate, TieGoesToLowestIndex) {
  RadioEnvironment env = make_environment(Area::Urban, {0, 0, 100, 100});
  env.stations = {{0, 0}, {10, 0}, {5, 10}};
  EXPECT_EQ(associate({5, 0}, env), 0u);
  EXPECT_EQ(associate({9, 0}, env), 1u);
  EXPECT_EQ(associate({5, 9}, env), 2u);
}

TEST(Associate, MatchesBruteForce) {
  const auto env = make_environment(Area::Suburban, Rect::centered({0, 0}, 4500, 4500));
  ASSERT_GT(env.stations.size(), 4u);
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 p{rng.uniform(-2500, 2500), rng.uniform(-2500, 2500)};
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < env.stations.size(); ++s) {
      const double d = std::hypot(p.x - env.stations[s].x, p.y - env.stations[s].y);
      if (d < best_d) {
        best_d = d;
        best = s;
      }
    }
    ASSERT_EQ(associate(p, env), best);
  }
}

TEST(TrajectoryCsv, RoundTrip) {
  std::vector<VehicleTrajectory> trajs;
  for (std::uint32_t id = 0; id < 3; ++id) {
    PathParams p = params(60.0);
    p.vehicle_id = id;
    trajs.push_back(generate_path(100 + id, p));
  }
  std::stringstream ss;
  write_trajectory_csv(trajs, ss);
  const auto back = read_trajectory_csv(ss);
  ASSERT_EQ(back.size(), trajs.size());
  for (std::size_t v = 0; v < trajs.size(); ++v) {
    EXPECT_EQ(back[v].vehicle_id, trajs[v].vehicle_id);
    ASSERT_EQ(back[v].samples.size(), trajs[v].samples.size());
    for (std::size_t i = 0; i < trajs[v].samples.size(); ++i) {
      EXPECT_NEAR(back[v].samples[i].t, trajs[v].samples[i].t, 5e-7);
      EXPECT_NEAR(back[v].samples[i].position.x, trajs[v].samples[i].position.x, 5e-4);
      EXPECT_NEAR(back[v].samples[i].position.y, trajs[v].samples[i].position.y, 5e-4);
    }
  }
}

TEST(TrajectoryCsv, RejectsMalformed) {
  std::istringstream no_header("1,0,0,0\n");
  EXPECT_THROW(read_trajectory_csv(no_header), InvalidInput);
  std::istringstream short_row("vehicle_id,t,x,y\n1,0,0\n");
  EXPECT_THROW(read_trajectory_csv(short_row), InvalidInput);
  std::istringstream bad_number("vehicle_id,t,x,y\n1,abc,0,0\n");
  EXPECT_THROW(read_trajectory_csv(bad_number), InvalidInput);
  std::istringstream backwards("vehicle_id,t,x,y\n1,1,0,0\n1,0.5,0,0\n");
  EXPECT_THROW(read_trajectory_csv(backwards), InvalidInput);
}
