#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "twinsim/geometry.hpp"

namespace twinsim {

// Baseline contributor-selection policies. None of them is "smart"; they give
// reference points for comparing selection strategies.

struct Candidate {
  std::uint32_t contributor_id = 0;
  ViewpointSet planned;
  double estimated_offload_rate = 0.0;  // Mbps
};

enum class SelectionPolicy { All, RandomK, GreedyCoverage };

std::string_view to_string(SelectionPolicy p);
SelectionPolicy parse_selection_policy(std::string_view name);

struct Selection {
  std::vector<std::uint32_t> ids;  // in selection order
  std::vector<std::size_t> marginal_gains;  // bins added per pick (GreedyCoverage only)
  double union_coverage = 0.0;
};

/// Throws InvalidInput when k exceeds the candidate count (ignored for All)
/// or a candidate plans no viewpoints.
Selection select_contributors(std::span<const Candidate> candidates, std::size_t k,
                              SelectionPolicy policy, std::uint64_t seed);

/// Azimuth-bin coverage fraction of the union of the given candidates' views.
double union_coverage(std::span<const Candidate> candidates, std::span<const std::uint32_t> ids,
                      std::size_t bins = kDefaultAzimuthBins);

enum class RoadTopology { Highway, Intersection, Roundabout };

std::string_view to_string(RoadTopology t);
RoadTopology parse_road_topology(std::string_view name);

struct TopologyScenario {
  RoadTopology kind = RoadTopology::Intersection;
  double side_view_probability = 0.5;
  double occlusion_probability = 0.2;
  double view_distance = 8.0;  // m from target center
  double camera_height = 1.5;  // m

  static TopologyScenario preset(RoadTopology kind);
  void validate() const;
};

/// Side sectors are azimuths in [60, 120) and [240, 300) degrees, the target's
/// heading being +x.
bool in_side_sector(double azimuth_deg);

/// n views around the target; each lands in a side sector with
/// side_view_probability and is discarded for occlusion with
/// occlusion_probability, redrawing until n survive.
ViewpointSet generate_topology_viewpoints(const TopologyScenario& scenario, std::size_t n,
                                          std::uint64_t seed);

// CSV policy,k,selected_ids,union_coverage_fraction; ids joined with ';'.
void write_selection_report_header(std::ostream& os);
void write_selection_report_row(SelectionPolicy policy, std::size_t k, const Selection& selection,
                                std::ostream& os);

}  // namespace twinsim
