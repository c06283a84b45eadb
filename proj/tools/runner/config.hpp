#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twinsim/geometry.hpp"
#include "twinsim/pipeline.hpp"
#include "twinsim/radio.hpp"
#include "twinsim/selection.hpp"

namespace twinsim::runner {

enum class ExperimentKind { Heatmap, FidelityTable, TradeoffSweep, EndToEnd, Selection };

std::string_view to_string(ExperimentKind k);

struct AreaSettings {
  RadioOverrides radio;
  std::size_t background_users = 0;
  std::optional<double> region_side_m;
};

/// Other users per station shipped for each area. Rural cells see fewer users,
/// which is what keeps rural latency below suburban under equal sharing.
std::size_t default_background_users(Area area);

struct Overrides {
  std::map<Area, AreaSettings> areas;

  double speed_min = 8.0;
  double speed_max = 16.0;
  double mobility_timestep = 1.0;

  bool mask = true;
  std::optional<std::size_t> image_count;  // default depends on scenario
  OffloadOptions offload;
  StageLatencies stages;
  CompressionProfile compression;
  std::optional<double> link_override_mbps;

  double rig_frame_rate = 2.0;
  double hemisphere_radius = 4.0;
  double cap_angle_deg = 30.0;
  double target_radius = 1.0;
  double camera_angle_x = 0.6911112070083618;

  std::optional<std::filesystem::path> calibration;

  std::optional<double> heatmap_cell_m;  // default: inter-site distance / 20
  std::size_t heatmap_sharing = 1;

  RoadTopology topology = RoadTopology::Intersection;
  std::size_t selection_candidates = 8;
  std::size_t selection_views = 6;
  std::size_t selection_k = 3;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::EndToEnd;
  std::vector<Area> areas{Area::Rural, Area::Suburban, Area::Urban};
  Scenario scenario = Scenario::Unbounded;
  std::vector<int> q_values{90};
  std::vector<std::uint64_t> seeds{1};
  std::size_t vehicle_count = 1;
  std::filesystem::path output_dir = "out";
  Overrides overrides;

  std::size_t image_count() const;
  /// Fully resolved end-to-end parameters for one (area, q, seed) cell.
  EndToEndConfig end_to_end(Area area, int q, std::uint64_t seed) const;
};

struct Diagnostic {
  int line = 0;  // 1-based, 0 when unknown
  int column = 0;
  std::string field;
  std::string message;
};

struct ValidationResult {
  std::optional<ExperimentConfig> config;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty() && config.has_value(); }
};

/// Parses and checks a configuration document, collecting every problem.
ValidationResult parse_config(const std::string& text);

/// Reads and parses a file. Throws IoError if it cannot be read.
ValidationResult validate_config(const std::filesystem::path& path);

std::string format_diagnostic(const std::string& source, const Diagnostic& d);

}  // namespace twinsim::runner
