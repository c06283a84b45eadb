#include "config.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "twinsim/errors.hpp"

namespace twinsim::runner {

namespace {

// Walks a YAML document, records every problem found, and keeps going.
class Reader {
 public:
  explicit Reader(std::vector<Diagnostic>& diags) : diags_(diags) {}

  void error(const YAML::Mark& mark, const std::string& field, std::string message) {
    Diagnostic d;
    if (mark.line >= 0) {
      d.line = mark.line + 1;
      d.column = mark.column + 1;
    }
    d.field = field;
    d.message = std::move(message);
    diags_.push_back(std::move(d));
  }

  void error(const YAML::Node& node, const std::string& field, std::string message) {
    error(node.Mark(), field, std::move(message));
  }

  // Reports keys of `map` that are not in `allowed`.
  bool expect_map(const YAML::Node& map, const std::string& field,
                  std::initializer_list<std::string_view> allowed) {
    if (!map.IsMap()) {
      error(map, field, "expected a table of key/value pairs");
      return false;
    }
    for (auto it = map.begin(); it != map.end(); ++it) {
      const std::string key = it->first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        error(it->first.Mark(), join(field, key),
              fmt::format("unknown key (allowed: {})", list(allowed)));
      }
    }
    return true;
  }

  std::optional<double> real(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) {
      error(n, field, "expected a number");
      return std::nullopt;
    }
    try {
      const double v = n.as<double>();
      if (std::isnan(v)) {
        error(n, field, "NaN is not allowed");
        return std::nullopt;
      }
      return v;
    } catch (const YAML::Exception&) {
      error(n, field, fmt::format("expected a number, got '{}'", n.Scalar()));
      return std::nullopt;
    }
  }

  std::optional<long long> integer(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) {
      error(n, field, "expected an integer");
      return std::nullopt;
    }
    try {
      return n.as<long long>();
    } catch (const YAML::Exception&) {
      error(n, field, fmt::format("expected an integer, got '{}'", n.Scalar()));
      return std::nullopt;
    }
  }

  std::optional<bool> boolean(const YAML::Node& n, const std::string& field) {
    try {
      if (n.IsScalar()) return n.as<bool>();
    } catch (const YAML::Exception&) {
    }
    error(n, field, "expected true or false");
    return std::nullopt;
  }

  std::optional<std::string> text(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) {
      error(n, field, "expected a string");
      return std::nullopt;
    }
    return n.Scalar();
  }

  // Real in [lo, hi] (or (lo, hi] when lo_open), assigned to `out` when valid.
  template <typename T>
  void real_in(const YAML::Node& parent, const char* key, const std::string& prefix, T& out,
               double lo, double hi, bool lo_open, std::string_view range) {
    const YAML::Node n = parent[key];
    if (!n) return;
    const std::string field = join(prefix, key);
    const auto v = real(n, field);
    if (!v) return;
    const bool lower_ok = lo_open ? *v > lo : *v >= lo;
    if (!lower_ok || *v > hi) {
      error(n, field, fmt::format("value {} outside allowed range {}", n.Scalar(), range));
      return;
    }
    out = *v;
  }

  template <typename T>
  void positive(const YAML::Node& parent, const char* key, const std::string& prefix, T& out) {
    real_in(parent, key, prefix, out, 0.0, std::numeric_limits<double>::max(), true, "(0, inf)");
  }

  template <typename T>
  void non_negative(const YAML::Node& parent, const char* key, const std::string& prefix, T& out) {
    real_in(parent, key, prefix, out, 0.0, std::numeric_limits<double>::max(), false, "[0, inf)");
  }

  template <typename T>
  void finite(const YAML::Node& parent, const char* key, const std::string& prefix, T& out) {
    real_in(parent, key, prefix, out, std::numeric_limits<double>::lowest(),
            std::numeric_limits<double>::max(), false, "finite");
  }

  template <typename T>
  void count(const YAML::Node& parent, const char* key, const std::string& prefix, T& out,
             long long min) {
    const YAML::Node n = parent[key];
    if (!n) return;
    const std::string field = join(prefix, key);
    const auto v = integer(n, field);
    if (!v) return;
    if (*v < min) {
      error(n, field, fmt::format("value {} must be >= {}", *v, min));
      return;
    }
    out = static_cast<std::size_t>(*v);
  }

  static std::string join(const std::string& prefix, std::string_view key) {
    return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
  }

 private:
  static std::string list(std::initializer_list<std::string_view> keys) {
    std::string out;
    for (std::string_view k : keys) {
      if (!out.empty()) out += ", ";
      out += k;
    }
    return out;
  }

  std::vector<Diagnostic>& diags_;
};

void read_radio_keys(Reader& r, const YAML::Node& node, const std::string& prefix,
                     AreaSettings& s) {
  auto set = [&](const char* key, std::optional<double>& slot,
                 const std::function<void(const YAML::Node&, const char*, const std::string&,
                                          double&)>& check) {
    if (!node[key]) return;
    double v = std::numeric_limits<double>::quiet_NaN();
    check(node, key, prefix, v);
    if (!std::isnan(v)) slot = v;
  };
  auto pos = [&](const YAML::Node& n, const char* k, const std::string& p, double& o) {
    r.positive(n, k, p, o);
  };
  auto fin = [&](const YAML::Node& n, const char* k, const std::string& p, double& o) {
    r.finite(n, k, p, o);
  };
  set("carrier_freq_ghz", s.radio.carrier_freq_ghz, pos);
  set("inter_site_distance_m", s.radio.inter_site_distance_m, pos);
  set("bandwidth_mhz", s.radio.bandwidth_mhz, pos);
  set("tx_power_dbm", s.radio.tx_power_dbm, fin);
  set("noise_figure_db", s.radio.noise_figure_db, fin);
  set("path_loss_exponent", s.radio.path_loss_exponent, pos);
  set("se_cap", s.radio.se_cap, pos);
  set("region_side_m", s.region_side_m, pos);
  if (node["mimo_streams"]) {
    std::size_t streams = 0;
    r.count(node, "mimo_streams", prefix, streams, 1);
    if (streams > 0) s.radio.mimo_streams = static_cast<int>(streams);
  }
  r.count(node, "background_users", prefix, s.background_users, 0);
}

void read_overrides(Reader& r, const YAML::Node& node, ExperimentConfig& cfg,
                    const std::filesystem::path& base_dir) {
  Overrides& o = cfg.overrides;
  if (!r.expect_map(node, "overrides",
                    {"radio", "mobility", "pipeline", "geometry", "fidelity", "heatmap",
                     "selection"})) {
    return;
  }

  if (const YAML::Node radio = node["radio"]) {
    const std::initializer_list<std::string_view> area_keys = {
        "carrier_freq_ghz", "inter_site_distance_m", "mimo_streams", "bandwidth_mhz",
        "tx_power_dbm",     "noise_figure_db",       "path_loss_exponent", "se_cap",
        "background_users", "region_side_m"};
    const std::initializer_list<std::string_view> allowed = {
        "carrier_freq_ghz", "inter_site_distance_m", "mimo_streams", "bandwidth_mhz",
        "tx_power_dbm",     "noise_figure_db",       "path_loss_exponent", "se_cap",
        "background_users", "region_side_m",         "rural",        "suburban",
        "urban"};
    if (r.expect_map(radio, "overrides.radio", allowed)) {
      // Shared keys first, then per-area tables on top.
      for (auto& [area, settings] : o.areas) read_radio_keys(r, radio, "overrides.radio", settings);
      for (Area area : {Area::Rural, Area::Suburban, Area::Urban}) {
        const std::string name(to_string(area));
        const YAML::Node sub = radio[name];
        if (!sub) continue;
        const std::string prefix = "overrides.radio." + name;
        if (r.expect_map(sub, prefix, area_keys)) read_radio_keys(r, sub, prefix, o.areas[area]);
      }
    }
  }

  if (const YAML::Node m = node["mobility"]) {
    const std::string p = "overrides.mobility";
    if (r.expect_map(m, p, {"speed_min_mps", "speed_max_mps", "timestep_s"})) {
      r.positive(m, "speed_min_mps", p, o.speed_min);
      r.positive(m, "speed_max_mps", p, o.speed_max);
      r.positive(m, "timestep_s", p, o.mobility_timestep);
      if (o.speed_max < o.speed_min) {
        r.error(m, p, fmt::format("speed_max_mps {} is below speed_min_mps {}", o.speed_max,
                                  o.speed_min));
      }
    }
  }

  if (const YAML::Node pl = node["pipeline"]) {
    const std::string p = "overrides.pipeline";
    if (r.expect_map(pl, p,
                     {"mask", "image_count", "offload_timestep_s", "horizon_s",
                      "induce_per_image_s", "segment_per_image_s", "compress_per_image_s",
                      "reconstruct_base_s", "size_max_mb", "size_min_mb", "link_override_mbps",
                      "rig_frame_rate_hz"})) {
      if (pl["mask"]) {
        if (auto v = r.boolean(pl["mask"], p + ".mask")) o.mask = *v;
      }
      if (pl["image_count"]) {
        std::size_t n = 0;
        r.count(pl, "image_count", p, n, 1);
        if (n > 0) o.image_count = n;
      }
      r.positive(pl, "offload_timestep_s", p, o.offload.timestep);
      r.positive(pl, "horizon_s", p, o.offload.horizon);
      r.non_negative(pl, "induce_per_image_s", p, o.stages.induce_per_image);
      r.non_negative(pl, "segment_per_image_s", p, o.stages.segment_per_image);
      r.non_negative(pl, "compress_per_image_s", p, o.stages.compress_per_image);
      r.non_negative(pl, "reconstruct_base_s", p, o.stages.reconstruct_base);
      r.positive(pl, "size_max_mb", p, o.compression.size_max_mb);
      r.positive(pl, "size_min_mb", p, o.compression.size_min_mb);
      if (!(o.compression.size_max_mb > o.compression.size_min_mb)) {
        r.error(pl, p, "size_max_mb must exceed size_min_mb");
      }
      if (const YAML::Node link = pl["link_override_mbps"]) {
        double rate = 0.0;
        r.real_in(pl, "link_override_mbps", p, rate, 0.0, std::numeric_limits<double>::infinity(),
                  true, "(0, inf]");
        if (rate > 0.0) o.link_override_mbps = rate;
      }
      r.positive(pl, "rig_frame_rate_hz", p, o.rig_frame_rate);
    }
  }

  if (const YAML::Node g = node["geometry"]) {
    const std::string p = "overrides.geometry";
    if (r.expect_map(g, p,
                     {"hemisphere_radius_m", "cap_angle_deg", "target_radius_m",
                      "camera_angle_x"})) {
      r.positive(g, "hemisphere_radius_m", p, o.hemisphere_radius);
      r.real_in(g, "cap_angle_deg", p, o.cap_angle_deg, 0.0, 89.999999, false, "[0, 90)");
      r.non_negative(g, "target_radius_m", p, o.target_radius);
      r.positive(g, "camera_angle_x", p, o.camera_angle_x);
    }
  }

  if (const YAML::Node f = node["fidelity"]) {
    const std::string p = "overrides.fidelity";
    if (r.expect_map(f, p, {"calibration"}) && f["calibration"]) {
      if (auto path = r.text(f["calibration"], p + ".calibration")) {
        std::filesystem::path resolved(*path);
        if (resolved.is_relative() && !base_dir.empty()) resolved = base_dir / resolved;
        if (!std::ifstream(resolved)) {
          r.error(f["calibration"], p + ".calibration",
                  fmt::format("cannot read calibration table '{}'", resolved.string()));
        } else {
          o.calibration = resolved;
        }
      }
    }
  }

  if (const YAML::Node h = node["heatmap"]) {
    const std::string p = "overrides.heatmap";
    if (r.expect_map(h, p, {"cell_size_m", "sharing_count"})) {
      if (h["cell_size_m"]) {
        double cell = 0.0;
        r.positive(h, "cell_size_m", p, cell);
        if (cell > 0.0) o.heatmap_cell_m = cell;
      }
      r.count(h, "sharing_count", p, o.heatmap_sharing, 1);
    }
  }

  if (const YAML::Node s = node["selection"]) {
    const std::string p = "overrides.selection";
    if (r.expect_map(s, p, {"topology", "candidates", "views_per_candidate", "k"})) {
      if (s["topology"]) {
        if (auto name = r.text(s["topology"], p + ".topology")) {
          try {
            o.topology = parse_road_topology(*name);
          } catch (const InvalidInput&) {
            r.error(s["topology"], p + ".topology",
                    fmt::format("'{}' is not one of highway, intersection, roundabout", *name));
          }
        }
      }
      r.count(s, "candidates", p, o.selection_candidates, 1);
      r.count(s, "views_per_candidate", p, o.selection_views, 1);
      r.count(s, "k", p, o.selection_k, 0);
      if (o.selection_k > o.selection_candidates) {
        r.error(s, p + ".k",
                fmt::format("k = {} exceeds candidates = {}", o.selection_k,
                            o.selection_candidates));
      }
    }
  }
}

ValidationResult parse_impl(const std::string& text, const std::filesystem::path& base_dir) {
  ValidationResult result;
  Reader r(result.diagnostics);

  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    r.error(e.mark, "", "syntax error: " + e.msg);
    return result;
  }
  if (!root || root.IsNull()) {
    r.error(YAML::Mark::null_mark(), "", "configuration is empty");
    return result;
  }
  if (!r.expect_map(root, "",
                    {"experiment", "area", "scenario", "q_values", "seeds", "vehicle_count",
                     "output_dir", "overrides"})) {
    return result;
  }

  ExperimentConfig cfg;
  for (Area a : {Area::Rural, Area::Suburban, Area::Urban}) {
    cfg.overrides.areas[a].background_users = default_background_users(a);
  }

  if (const YAML::Node e = root["experiment"]) {
    if (auto name = r.text(e, "experiment")) {
      bool found = false;
      for (auto k : {ExperimentKind::Heatmap, ExperimentKind::FidelityTable,
                     ExperimentKind::TradeoffSweep, ExperimentKind::EndToEnd,
                     ExperimentKind::Selection}) {
        if (to_string(k) == *name) {
          cfg.experiment = k;
          found = true;
        }
      }
      if (!found) {
        r.error(e, "experiment",
                fmt::format("'{}' is not one of heatmap, fidelity_table, tradeoff_sweep, "
                            "end_to_end, selection",
                            *name));
      }
    }
  } else {
    r.error(root.Mark(), "experiment", "missing required key");
  }

  if (const YAML::Node a = root["area"]) {
    std::vector<YAML::Node> items;
    if (a.IsSequence()) {
      for (const YAML::Node& item : a) items.push_back(item);
    } else {
      items.push_back(a);
    }
    if (items.empty()) r.error(a, "area", "at least one area is required");
    std::vector<Area> areas;
    for (const YAML::Node& item : items) {
      if (auto name = r.text(item, "area")) {
        try {
          const Area parsed = parse_area(*name);
          if (std::find(areas.begin(), areas.end(), parsed) != areas.end()) {
            r.error(item, "area", fmt::format("area '{}' listed twice", *name));
          }
          areas.push_back(parsed);
        } catch (const InvalidInput&) {
          r.error(item, "area", fmt::format("'{}' is not one of rural, suburban, urban", *name));
        }
      }
    }
    if (!areas.empty()) cfg.areas = areas;
  }

  if (const YAML::Node s = root["scenario"]) {
    if (auto name = r.text(s, "scenario")) {
      try {
        cfg.scenario = parse_scenario(*name);
      } catch (const InvalidInput&) {
        r.error(s, "scenario",
                fmt::format("'{}' is not one of ideal, disperse, unbounded, cooperative", *name));
      }
    }
  }

  if (const YAML::Node q = root["q_values"]) {
    if (!q.IsSequence()) {
      r.error(q, "q_values", "expected a list of integers in [30, 90]");
    } else if (q.size() == 0) {
      r.error(q, "q_values", "list is empty; give at least one value in [30, 90]");
    } else {
      cfg.q_values.clear();
      for (const YAML::Node& item : q) {
        if (auto v = r.integer(item, "q_values")) {
          if (*v < kMinQuality || *v > kMaxQuality) {
            r.error(item, "q_values", fmt::format("value {} outside allowed range [30, 90]", *v));
          } else {
            cfg.q_values.push_back(static_cast<int>(*v));
          }
        }
      }
    }
  }

  if (const YAML::Node s = root["seeds"]) {
    if (!s.IsSequence()) {
      r.error(s, "seeds", "expected a list of non-negative integers");
    } else if (s.size() == 0) {
      r.error(s, "seeds", "list is empty; at least one seed is required");
    } else {
      cfg.seeds.clear();
      for (const YAML::Node& item : s) {
        if (auto v = r.integer(item, "seeds")) {
          if (*v < 0) {
            r.error(item, "seeds", fmt::format("seed {} must be >= 0", *v));
          } else {
            cfg.seeds.push_back(static_cast<std::uint64_t>(*v));
          }
        }
      }
    }
  }

  r.count(root, "vehicle_count", "", cfg.vehicle_count, 1);

  if (const YAML::Node out = root["output_dir"]) {
    if (auto dir = r.text(out, "output_dir")) {
      if (dir->empty()) {
        r.error(out, "output_dir", "must not be empty");
      } else {
        cfg.output_dir = *dir;
      }
    }
  }

  if (const YAML::Node o = root["overrides"]) read_overrides(r, o, cfg, base_dir);

  if (result.diagnostics.empty()) result.config = std::move(cfg);
  return result;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Heatmap:
      return "heatmap";
    case ExperimentKind::FidelityTable:
      return "fidelity_table";
    case ExperimentKind::TradeoffSweep:
      return "tradeoff_sweep";
    case ExperimentKind::EndToEnd:
      return "end_to_end";
    case ExperimentKind::Selection:
      return "selection";
  }
  return "unknown";
}

std::size_t default_background_users(Area area) {
  switch (area) {
    case Area::Rural:
      return 0;
    case Area::Suburban:
    case Area::Urban:
      return 3;
  }
  return 0;
}

std::size_t ExperimentConfig::image_count() const {
  if (overrides.image_count) return *overrides.image_count;
  switch (scenario) {
    case Scenario::Ideal:
      return 100;
    case Scenario::Disperse:
      return 25;
    case Scenario::Unbounded:
    case Scenario::Cooperative:
      return 45;
  }
  return 45;
}

EndToEndConfig ExperimentConfig::end_to_end(Area area, int q, std::uint64_t seed) const {
  const Overrides& o = overrides;
  const AreaSettings& settings = o.areas.at(area);
  EndToEndConfig e;
  e.scenario = scenario;
  e.mask = o.mask;
  e.image_count = image_count();
  e.q = q;
  e.seed = seed;
  e.sampling.target_radius = o.target_radius;
  e.sampling.radius = o.hemisphere_radius;
  e.sampling.cap_angle_deg = o.cap_angle_deg;
  e.sampling.rig_frame_rate = o.rig_frame_rate;
  e.area = area;
  e.radio = settings.radio;
  if (settings.region_side_m) {
    e.region = Rect::centered({0.0, 0.0}, *settings.region_side_m, *settings.region_side_m);
  }
  e.background_users = settings.background_users;
  e.speed_min = o.speed_min;
  e.speed_max = o.speed_max;
  e.mobility_timestep = o.mobility_timestep;
  e.vehicle_count = vehicle_count;
  e.compression = o.compression;
  e.stages = o.stages;
  e.offload = o.offload;
  e.link_override_mbps = o.link_override_mbps;
  return e;
}

ValidationResult parse_config(const std::string& text) { return parse_impl(text, {}); }

ValidationResult validate_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read configuration " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_impl(ss.str(), path.parent_path());
}

std::string format_diagnostic(const std::string& source, const Diagnostic& d) {
  std::string where = source;
  if (d.line > 0) where += fmt::format(":{}:{}", d.line, d.column);
  if (d.field.empty()) return fmt::format("{}: {}", where, d.message);
  return fmt::format("{}: {}: {}", where, d.field, d.message);
}

}  // namespace twinsim::runner
