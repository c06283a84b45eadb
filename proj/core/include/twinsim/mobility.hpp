#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "twinsim/radio.hpp"
#include "twinsim/vec.hpp"

namespace twinsim {

struct TrajectorySample {
  double t = 0.0;
  Vec2 position;
};

struct VehicleTrajectory {
  std::uint32_t vehicle_id = 0;
  std::vector<TrajectorySample> samples;  // strictly increasing t
  double speed_min = 0.0;
  double speed_max = 0.0;
};

struct PathParams {
  Rect region;
  double speed_min = 8.0;  // m/s
  double speed_max = 16.0;
  double duration = 600.0;  // s
  double timestep = 1.0;    // s
  // Dwell at each waypoint. Samples during a pause move at zero speed, so the
  // speed-range property only holds with the default of 0.
  double pause = 0.0;
  std::uint32_t vehicle_id = 0;
};

// Random-waypoint walk: uniform waypoint in the region, uniform speed per leg.
// A sample is recorded every timestep and at every waypoint arrival, so each
// consecutive pair moves in a straight line at the leg speed.
VehicleTrajectory generate_path(std::uint64_t seed, const PathParams& params);

/// Linear interpolation between bracketing samples; clamps outside the span.
Vec2 position_at(const VehicleTrajectory& traj, double t);

/// Serving station: nearest, lowest index on ties.
std::size_t associate(Vec2 position, const RadioEnvironment& env);

// CSV vehicle_id,t,x,y; coordinates with 3 decimals.
void write_trajectory_csv(std::span<const VehicleTrajectory> trajectories, std::ostream& os);
std::vector<VehicleTrajectory> read_trajectory_csv(std::istream& is);

}  // namespace twinsim
