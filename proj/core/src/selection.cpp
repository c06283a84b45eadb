#include "twinsim/selection.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "twinsim/errors.hpp"
#include "twinsim/random.hpp"

namespace twinsim {

namespace {

using Bins = std::vector<bool>;

std::size_t count_new(const Bins& covered, const Bins& add) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < covered.size(); ++i) n += (!covered[i] && add[i]) ? 1 : 0;
  return n;
}

void merge(Bins& covered, const Bins& add) {
  for (std::size_t i = 0; i < covered.size(); ++i) covered[i] = covered[i] || add[i];
}

double fraction(const Bins& b) {
  return static_cast<double>(std::count(b.begin(), b.end(), true)) / static_cast<double>(b.size());
}

const Candidate& find_candidate(std::span<const Candidate> candidates, std::uint32_t id) {
  for (const Candidate& c : candidates) {
    if (c.contributor_id == id) return c;
  }
  throw InvalidInput(fmt::format("no candidate with id {}", id));
}

}  // namespace

std::string_view to_string(SelectionPolicy p) {
  switch (p) {
    case SelectionPolicy::All:
      return "all";
    case SelectionPolicy::RandomK:
      return "random_k";
    case SelectionPolicy::GreedyCoverage:
      return "greedy_coverage";
  }
  return "unknown";
}

SelectionPolicy parse_selection_policy(std::string_view name) {
  for (auto p : {SelectionPolicy::All, SelectionPolicy::RandomK, SelectionPolicy::GreedyCoverage}) {
    if (to_string(p) == name) return p;
  }
  throw InvalidInput("unknown selection policy '" + std::string(name) + "'");
}

double union_coverage(std::span<const Candidate> candidates, std::span<const std::uint32_t> ids,
                      std::size_t bins) {
  Bins covered(bins, false);
  for (std::uint32_t id : ids) merge(covered, azimuth_bins(find_candidate(candidates, id).planned, bins));
  return fraction(covered);
}

Selection select_contributors(std::span<const Candidate> candidates, std::size_t k,
                              SelectionPolicy policy, std::uint64_t seed) {
  for (const Candidate& c : candidates) {
    if (c.planned.poses.empty()) {
      throw InvalidInput(fmt::format("candidate {} plans no viewpoints", c.contributor_id));
    }
  }
  if (policy != SelectionPolicy::All && k > candidates.size()) {
    throw InvalidInput(fmt::format("cannot select {} of {} candidates", k, candidates.size()));
  }

  Selection out;
  switch (policy) {
    case SelectionPolicy::All:
      for (const Candidate& c : candidates) out.ids.push_back(c.contributor_id);
      break;
    case SelectionPolicy::RandomK: {
      // Partial Fisher-Yates over candidate positions.
      std::vector<std::size_t> idx(candidates.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      Rng rng(seed);
      for (std::size_t i = 0; i < k; ++i) {
        std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
        out.ids.push_back(candidates[idx[i]].contributor_id);
      }
      break;
    }
    case SelectionPolicy::GreedyCoverage: {
      std::vector<Bins> bins;
      bins.reserve(candidates.size());
      for (const Candidate& c : candidates) bins.push_back(azimuth_bins(c.planned));
      Bins covered(kDefaultAzimuthBins, false);
      std::vector<bool> taken(candidates.size(), false);
      for (std::size_t round = 0; round < k; ++round) {
        std::size_t best = candidates.size();
        std::size_t best_gain = 0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          if (taken[i]) continue;
          const std::size_t gain = count_new(covered, bins[i]);
          const bool better =
              best == candidates.size() || gain > best_gain ||
              (gain == best_gain && candidates[i].contributor_id < candidates[best].contributor_id);
          if (better) {
            best = i;
            best_gain = gain;
          }
        }
        taken[best] = true;
        merge(covered, bins[best]);
        out.ids.push_back(candidates[best].contributor_id);
        out.marginal_gains.push_back(best_gain);
      }
      break;
    }
  }
  out.union_coverage = out.ids.empty() ? 0.0 : union_coverage(candidates, out.ids);
  return out;
}

std::string_view to_string(RoadTopology t) {
  switch (t) {
    case RoadTopology::Highway:
      return "highway";
    case RoadTopology::Intersection:
      return "intersection";
    case RoadTopology::Roundabout:
      return "roundabout";
  }
  return "unknown";
}

RoadTopology parse_road_topology(std::string_view name) {
  for (auto t : {RoadTopology::Highway, RoadTopology::Intersection, RoadTopology::Roundabout}) {
    if (to_string(t) == name) return t;
  }
  throw InvalidInput("unknown road topology '" + std::string(name) + "'");
}

TopologyScenario TopologyScenario::preset(RoadTopology kind) {
  TopologyScenario s;
  s.kind = kind;
  switch (kind) {
    case RoadTopology::Highway:
      s.side_view_probability = 0.1;
      s.occlusion_probability = 0.1;
      break;
    case RoadTopology::Intersection:
      s.side_view_probability = 0.5;
      s.occlusion_probability = 0.2;
      break;
    case RoadTopology::Roundabout:
      s.side_view_probability = 0.5;
      s.occlusion_probability = 0.5;
      break;
  }
  return s;
}

void TopologyScenario::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(side_view_probability)) throw InvalidInput("side_view_probability outside [0, 1]");
  // Certain occlusion would never produce a surviving view.
  if (!(occlusion_probability >= 0.0 && occlusion_probability < 1.0)) {
    throw InvalidInput("occlusion_probability must be in [0, 1)");
  }
  if (!(view_distance > 0.0)) throw InvalidInput("view distance must be > 0");
}

bool in_side_sector(double az) {
  return (az >= 60.0 && az < 120.0) || (az >= 240.0 && az < 300.0);
}

ViewpointSet generate_topology_viewpoints(const TopologyScenario& scenario, std::size_t n,
                                          std::uint64_t seed) {
  scenario.validate();
  if (n == 0) throw InvalidInput("viewpoint count must be >= 1");
  ViewpointSet vs;
  vs.scenario = Scenario::Cooperative;
  vs.target_center = {0.0, 0.0, 0.0};
  vs.target_radius = 2.5;
  Rng rng(seed);
  std::uint32_t drawn = 0;
  while (vs.poses.size() < n) {
    // Side sectors span 120 degrees in total; the rest spans 240.
    double az = 0.0;
    if (rng.bernoulli(scenario.side_view_probability)) {
      const double u = rng.uniform(0.0, 120.0);
      az = u < 60.0 ? 60.0 + u : 240.0 + (u - 60.0);
    } else {
      const double u = rng.uniform(0.0, 240.0);
      az = u < 60.0 ? u : (u < 180.0 ? 120.0 + (u - 60.0) : 300.0 + (u - 180.0));
    }
    const bool occluded = rng.bernoulli(scenario.occlusion_probability);
    ++drawn;
    if (occluded) continue;
    const double rad = az * std::numbers::pi / 180.0;
    const Vec3 eye{scenario.view_distance * std::cos(rad), scenario.view_distance * std::sin(rad),
                   scenario.camera_height};
    CameraPose pose;
    pose.orientation = look_at(eye, vs.target_center);
    pose.translation = eye;
    pose.contributor_id = drawn - 1;
    vs.poses.push_back(pose);
  }
  return vs;
}

void write_selection_report_header(std::ostream& os) {
  os << "policy,k,selected_ids,union_coverage_fraction\n";
}

void write_selection_report_row(SelectionPolicy policy, std::size_t k, const Selection& selection,
                                std::ostream& os) {
  os << fmt::format("{},{},{},{:.6f}\n", to_string(policy), k, fmt::join(selection.ids, ";"),
                    selection.union_coverage);
}

}  // namespace twinsim
