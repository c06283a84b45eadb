#include "twinsim/mobility.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "twinsim/errors.hpp"
#include "twinsim/random.hpp"

namespace twinsim {

namespace {

// Steps shorter than this are folded into the neighbouring one.
constexpr double kMinStep = 1e-4;

Vec2 uniform_point(Rng& rng, const Rect& r) {
  const double x = rng.uniform(r.min_x, r.max_x);
  const double y = rng.uniform(r.min_y, r.max_y);
  return {x, y};
}

Vec2 clamp_to(const Rect& r, Vec2 p) {
  return {std::clamp(p.x, r.min_x, r.max_x), std::clamp(p.y, r.min_y, r.max_y)};
}

}  // namespace

VehicleTrajectory generate_path(std::uint64_t seed, const PathParams& params) {
  const Rect& region = params.region;
  if (region.degenerate()) throw InvalidInput("mobility region is degenerate");
  if (!(params.duration >= 0.0) || !std::isfinite(params.duration)) {
    throw InvalidInput("duration must be >= 0");
  }
  if (!(params.timestep > 0.0)) throw InvalidInput("timestep must be > 0");
  if (!(params.speed_min > 0.0) || !(params.speed_max >= params.speed_min)) {
    throw InvalidInput("speed range must satisfy 0 < min <= max");
  }
  if (!(params.pause >= 0.0)) throw InvalidInput("pause must be >= 0");

  Rng rng(seed);
  VehicleTrajectory traj;
  traj.vehicle_id = params.vehicle_id;
  traj.speed_min = params.speed_min;
  traj.speed_max = params.speed_max;

  double t = 0.0;
  Vec2 p = uniform_point(rng, region);
  traj.samples.push_back({t, p});

  Vec2 waypoint = uniform_point(rng, region);
  double speed = rng.uniform(params.speed_min, params.speed_max);

  while (t < params.duration) {
    const double remaining = params.duration - t;
    const double leg = distance(p, waypoint);
    if (leg < 1e-9) {
      waypoint = uniform_point(rng, region);
      continue;
    }
    const double to_waypoint = leg / speed;
    double step = std::min({params.timestep, to_waypoint, remaining});
    if (to_waypoint - step < kMinStep && to_waypoint <= remaining + kMinStep) step = to_waypoint;
    if (remaining - step < kMinStep) step = remaining;

    const bool arrived = step >= to_waypoint;
    p = arrived ? waypoint : clamp_to(region, p + (speed * step / leg) * (waypoint - p));
    t = (step == remaining) ? params.duration : t + step;
    traj.samples.push_back({t, p});

    if (arrived) {
      if (params.pause > 0.0 && t < params.duration) {
        const double dwell = std::min(params.pause, params.duration - t);
        t = (dwell == params.duration - t) ? params.duration : t + dwell;
        traj.samples.push_back({t, p});
      }
      waypoint = uniform_point(rng, region);
      speed = rng.uniform(params.speed_min, params.speed_max);
    }
  }
  return traj;
}

Vec2 position_at(const VehicleTrajectory& traj, double t) {
  const auto& s = traj.samples;
  if (s.empty()) throw InvalidInput("trajectory has no samples");
  if (t <= s.front().t) return s.front().position;
  if (t >= s.back().t) return s.back().position;
  const auto hi = std::upper_bound(s.begin(), s.end(), t,
                                   [](double v, const TrajectorySample& x) { return v < x.t; });
  const auto lo = hi - 1;
  if (lo->t == t) return lo->position;
  const double a = (t - lo->t) / (hi->t - lo->t);
  return lo->position + a * (hi->position - lo->position);
}

std::size_t associate(Vec2 position, const RadioEnvironment& env) {
  return nearest_station(env, position);
}

void write_trajectory_csv(std::span<const VehicleTrajectory> trajectories, std::ostream& os) {
  os << "vehicle_id,t,x,y\n";
  for (const VehicleTrajectory& traj : trajectories) {
    for (const TrajectorySample& s : traj.samples) {
      os << fmt::format("{},{:.6f},{:.3f},{:.3f}\n", traj.vehicle_id, s.t, s.position.x,
                        s.position.y);
    }
  }
}

std::vector<VehicleTrajectory> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "vehicle_id,t,x,y") {
    throw InvalidInput("trajectory CSV must start with header vehicle_id,t,x,y");
  }
  std::map<std::uint32_t, VehicleTrajectory> by_id;
  std::vector<std::uint32_t> order;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id, t, x, y;
    if (!std::getline(fields, id, ',') || !std::getline(fields, t, ',') ||
        !std::getline(fields, x, ',') || !std::getline(fields, y)) {
      throw InvalidInput(fmt::format("trajectory CSV line {}: expected 4 fields", lineno));
    }
    try {
      const auto vid = static_cast<std::uint32_t>(std::stoul(id));
      auto [it, inserted] = by_id.try_emplace(vid);
      if (inserted) {
        it->second.vehicle_id = vid;
        order.push_back(vid);
      }
      const TrajectorySample sample{std::stod(t), {std::stod(x), std::stod(y)}};
      if (!it->second.samples.empty() && !(sample.t > it->second.samples.back().t)) {
        throw InvalidInput(fmt::format("trajectory CSV line {}: timestamps must increase", lineno));
      }
      it->second.samples.push_back(sample);
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const InvalidInput*>(&e)) throw;
      throw InvalidInput(fmt::format("trajectory CSV line {}: bad number", lineno));
    }
  }
  std::vector<VehicleTrajectory> out;
  for (std::uint32_t id : order) out.push_back(std::move(by_id[id]));
  return out;
}

}  // namespace twinsim
