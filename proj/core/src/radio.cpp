#include "twinsim/radio.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "twinsim/errors.hpp"

namespace twinsim {

namespace {

struct Preset {
  double freq_ghz;
  double isd_m;
  double bandwidth_mhz;
  double exponent;
};

Preset preset_for(Area area) {
  switch (area) {
    case Area::Rural:
      return {0.7, 2900.0, 10.0, 2.6};
    case Area::Suburban:
      return {1.8, 900.0, 20.0, 3.0};
    case Area::Urban:
      return {2.5, 440.0, 40.0, 3.2};
  }
  throw InvalidInput("unknown area");
}

// Grid offsets k such that center + k * pitch stays within [lo, hi].
std::vector<double> grid_axis(double lo, double hi, double center, double pitch) {
  constexpr double kEdgeTol = 1e-9;
  const auto below = static_cast<long>(std::floor((center - lo) / pitch + kEdgeTol));
  const auto above = static_cast<long>(std::floor((hi - center) / pitch + kEdgeTol));
  std::vector<double> out;
  for (long k = -below; k <= above; ++k) out.push_back(center + static_cast<double>(k) * pitch);
  return out;
}

}  // namespace

std::string_view to_string(Area a) {
  switch (a) {
    case Area::Rural:
      return "rural";
    case Area::Suburban:
      return "suburban";
    case Area::Urban:
      return "urban";
  }
  return "unknown";
}

Area parse_area(std::string_view name) {
  for (Area a : {Area::Rural, Area::Suburban, Area::Urban}) {
    if (to_string(a) == name) return a;
  }
  throw InvalidInput("unknown area '" + std::string(name) + "'");
}

double preset_inter_site_distance(Area area) { return preset_for(area).isd_m; }

void RadioEnvironment::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(carrier_freq_ghz)) throw InvalidInput("carrier frequency must be > 0");
  if (!positive(inter_site_distance_m)) throw InvalidInput("inter-site distance must be > 0");
  if (mimo_streams < 1) throw InvalidInput("mimo_streams must be >= 1");
  if (!positive(bandwidth_mhz)) throw InvalidInput("bandwidth must be > 0");
  if (!std::isfinite(tx_power_dbm)) throw InvalidInput("tx power must be finite");
  if (!std::isfinite(noise_figure_db)) throw InvalidInput("noise figure must be finite");
  if (!positive(path_loss_exponent)) throw InvalidInput("path loss exponent must be > 0");
  if (!positive(se_cap)) throw InvalidInput("spectral efficiency cap must be > 0");
  if (stations.empty()) throw InvalidInput("environment has no stations");
}

RadioEnvironment make_environment(Area area, const Rect& region, const RadioOverrides& overrides) {
  if (region.degenerate() || !std::isfinite(region.width()) || !std::isfinite(region.height())) {
    throw InvalidInput("radio region must have positive finite extent");
  }
  const Preset p = preset_for(area);
  RadioEnvironment env;
  env.area = area;
  env.carrier_freq_ghz = overrides.carrier_freq_ghz.value_or(p.freq_ghz);
  env.inter_site_distance_m = overrides.inter_site_distance_m.value_or(p.isd_m);
  env.mimo_streams = overrides.mimo_streams.value_or(2);
  env.bandwidth_mhz = overrides.bandwidth_mhz.value_or(p.bandwidth_mhz);
  env.tx_power_dbm = overrides.tx_power_dbm.value_or(40.0);
  env.noise_figure_db = overrides.noise_figure_db.value_or(7.0);
  env.path_loss_exponent = overrides.path_loss_exponent.value_or(p.exponent);
  env.se_cap = overrides.se_cap.value_or(7.8);
  env.region = region;

  if (!(env.inter_site_distance_m > 0.0)) throw InvalidInput("inter-site distance must be > 0");
  const Vec2 c = region.center();
  const auto xs = grid_axis(region.min_x, region.max_x, c.x, env.inter_site_distance_m);
  const auto ys = grid_axis(region.min_y, region.max_y, c.y, env.inter_site_distance_m);
  for (double y : ys) {
    for (double x : xs) env.stations.push_back({x, y});
  }
  env.validate();
  return env;
}

double path_loss_db(double freq_ghz, double distance_m, double exponent) {
  if (!(freq_ghz > 0.0) || !std::isfinite(freq_ghz)) {
    throw InvalidInput("frequency must be positive");
  }
  if (std::isnan(distance_m) || std::isnan(exponent)) throw InvalidInput("NaN path loss input");
  const double d_km = std::max(distance_m, kMinLinkDistance) / 1000.0;
  const double fspl_1km = 32.44 + 20.0 * std::log10(freq_ghz * 1000.0);
  return fspl_1km + 10.0 * exponent * std::log10(d_km);
}

double noise_floor_dbm(double bandwidth_mhz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_mhz * 1e6) + noise_figure_db;
}

double snr_db(const RadioEnvironment& env, double distance_m) {
  return env.tx_power_dbm - path_loss_db(env.carrier_freq_ghz, distance_m, env.path_loss_exponent) -
         noise_floor_dbm(env.bandwidth_mhz, env.noise_figure_db);
}

std::size_t nearest_station(const RadioEnvironment& env, Vec2 p) {
  if (env.stations.empty()) throw InvalidInput("environment has no stations");
  std::size_t best = 0;
  double best_d2 = INFINITY;
  for (std::size_t i = 0; i < env.stations.size(); ++i) {
    const double dx = env.stations[i].x - p.x;
    const double dy = env.stations[i].y - p.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

double link_throughput(const RadioEnvironment& env, Vec2 position, std::size_t sharing_count) {
  if (sharing_count < 1) throw InvalidInput("sharing count must be >= 1");
  if (std::isnan(position.x) || std::isnan(position.y)) throw InvalidInput("NaN position");
  if (std::isnan(env.tx_power_dbm) || std::isnan(env.noise_figure_db) ||
      std::isnan(env.bandwidth_mhz) || std::isnan(env.se_cap) ||
      std::isnan(env.path_loss_exponent)) {
    throw InvalidInput("NaN radio parameter");
  }
  const std::size_t station = nearest_station(env, position);
  const double d = distance(env.stations[station], position);
  const double snr_linear = std::pow(10.0, snr_db(env, d) / 10.0);
  const double se = std::min(static_cast<double>(env.mimo_streams) * std::log2(1.0 + snr_linear),
                             env.se_cap);
  return se * env.bandwidth_mhz / static_cast<double>(sharing_count);
}

Vec2 Heatmap::cell_center(std::size_t row, std::size_t col) const {
  return {origin.x + (static_cast<double>(col) + 0.5) * cell_size,
          origin.y + (static_cast<double>(row) + 0.5) * cell_size};
}

Heatmap heatmap(const RadioEnvironment& env, double cell_size, std::size_t sharing_count) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw InvalidInput("cell size must be > 0");
  }
  auto count = [cell_size](double extent) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(extent / cell_size - 1e-9)));
  };
  Heatmap map;
  map.cell_size = cell_size;
  map.cols = count(env.region.width());
  map.rows = count(env.region.height());
  const Vec2 c = env.region.center();
  map.origin = {c.x - 0.5 * static_cast<double>(map.cols) * cell_size,
                c.y - 0.5 * static_cast<double>(map.rows) * cell_size};
  map.values.reserve(map.rows * map.cols);
  for (std::size_t r = 0; r < map.rows; ++r) {
    for (std::size_t col = 0; col < map.cols; ++col) {
      map.values.push_back(link_throughput(env, map.cell_center(r, col), sharing_count));
    }
  }
  return map;
}

void write_heatmap_csv(const Heatmap& map, std::ostream& os) {
  os << "x,y,throughput_mbps\n";
  for (std::size_t r = 0; r < map.rows; ++r) {
    for (std::size_t c = 0; c < map.cols; ++c) {
      const Vec2 p = map.cell_center(r, c);
      os << fmt::format("{:.6f},{:.6f},{:.6f}\n", p.x, p.y, map.at(r, c));
    }
  }
}

}  // namespace twinsim
