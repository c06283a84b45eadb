#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "twinsim/vec.hpp"

namespace twinsim {

enum class Area { Rural, Suburban, Urban };

std::string_view to_string(Area a);
Area parse_area(std::string_view name);

// Cell-layout and link-budget parameters for one area. Built by
// make_environment and treated as immutable afterwards.
struct RadioEnvironment {
  Area area = Area::Urban;
  double carrier_freq_ghz = 0.0;
  double inter_site_distance_m = 0.0;
  int mimo_streams = 2;
  double bandwidth_mhz = 0.0;
  double tx_power_dbm = 40.0;
  double noise_figure_db = 7.0;
  double path_loss_exponent = 3.0;
  double se_cap = 7.8;  // b/s/Hz, applies to the multiplexed total
  Rect region;
  std::vector<Vec2> stations;

  /// Throws InvalidInput on NaN or out-of-domain parameters.
  void validate() const;
};

struct RadioOverrides {
  std::optional<double> carrier_freq_ghz;
  std::optional<double> inter_site_distance_m;
  std::optional<int> mimo_streams;
  std::optional<double> bandwidth_mhz;
  std::optional<double> tx_power_dbm;
  std::optional<double> noise_figure_db;
  std::optional<double> path_loss_exponent;
  std::optional<double> se_cap;
};

/// Inter-site distance of the area preset, meters.
double preset_inter_site_distance(Area area);

/// Preset for the area with overrides applied. Stations sit on a square grid
/// with pitch inter_site_distance_m, one of them at the region center.
RadioEnvironment make_environment(Area area, const Rect& region,
                                  const RadioOverrides& overrides = {});

constexpr double kMinLinkDistance = 10.0;

/// Log-distance path loss anchored at the 1 km free-space value:
/// 32.44 + 20 log10(f_MHz) + 10 n log10(d_km), distance clamped to >= 10 m.
double path_loss_db(double freq_ghz, double distance_m, double exponent);

/// Thermal noise -174 dBm/Hz over the band plus the receiver noise figure.
double noise_floor_dbm(double bandwidth_mhz, double noise_figure_db);

double snr_db(const RadioEnvironment& env, double distance_m);

/// Nearest station to p, ties resolved to the lowest index.
std::size_t nearest_station(const RadioEnvironment& env, Vec2 p);

/// Throughput in Mbps for a vehicle at position sharing its serving cell
/// equally with sharing_count - 1 others.
double link_throughput(const RadioEnvironment& env, Vec2 position, std::size_t sharing_count);

struct Heatmap {
  Vec2 origin;
  double cell_size = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major, Mbps

  double at(std::size_t row, std::size_t col) const { return values[row * cols + col]; }
  Vec2 cell_center(std::size_t row, std::size_t col) const;
};

/// Samples link_throughput at every cell center. The grid is centered on the
/// region; a cell larger than the region yields a single cell.
Heatmap heatmap(const RadioEnvironment& env, double cell_size, std::size_t sharing_count = 1);

// CSV: x,y,throughput_mbps with 6 decimals, row-major.
void write_heatmap_csv(const Heatmap& map, std::ostream& os);

}  // namespace twinsim
