#include "twinsim/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "twinsim/errors.hpp"

namespace twinsim {

void CompressionProfile::validate() const {
  if (!(size_min_mb > 0.0) || !(size_max_mb > size_min_mb) || !std::isfinite(size_max_mb)) {
    throw InvalidInput("compression anchors must satisfy max > min > 0");
  }
}

double compressed_size_mb(const CompressionProfile& profile, int q) {
  profile.validate();
  if (q < kMinQuality || q > kMaxQuality) {
    throw InvalidInput(fmt::format("compression parameter {} outside [30, 90]", q));
  }
  if (q == kMaxQuality) return profile.size_max_mb;
  if (q == kMinQuality) return profile.size_min_mb;
  const double exponent = static_cast<double>(kMaxQuality - q) / 60.0;
  return profile.size_max_mb * std::pow(profile.size_min_mb / profile.size_max_mb, exponent);
}

OffloadTask OffloadTask::create(std::uint32_t vehicle_id, double bytes, double start_time) {
  if (!(bytes >= 0.0) || !std::isfinite(bytes)) throw InvalidInput("payload must be >= 0 bytes");
  if (!(start_time >= 0.0)) throw InvalidInput("start time must be >= 0");
  OffloadTask t;
  t.vehicle_id = vehicle_id;
  t.total_bytes = bytes;
  t.remaining_bytes = bytes;
  t.start_time = start_time;
  return t;
}

OffloadResult integrate_offload(OffloadTask task, const RateFunction& rate_mbps,
                                const OffloadOptions& options) {
  if (!(options.timestep > 0.0)) throw InvalidInput("offload timestep must be > 0");
  if (!(options.horizon >= 0.0)) throw InvalidInput("offload horizon must be >= 0");
  if (task.remaining_bytes != task.total_bytes) {
    throw InvalidInput("offload task must start with its full payload remaining");
  }

  OffloadResult out;
  if (task.total_bytes == 0.0) {
    task.finish_time = task.start_time;
    out.task = task;
    return out;
  }

  for (std::size_t k = 0;; ++k) {
    const double elapsed = static_cast<double>(k) * options.timestep;
    if (elapsed >= options.horizon) break;
    const double t = task.start_time + elapsed;
    const double rate = rate_mbps(t);
    if (!(rate >= 0.0)) throw InvalidInput("link rate must be >= 0");
    const double bytes_per_s = rate * kBytesPerMb / 8.0;
    const double step_bytes = bytes_per_s * options.timestep;
    ++out.steps;
    if (step_bytes >= task.remaining_bytes) {
      const double partial = std::isinf(bytes_per_s) ? 0.0 : task.remaining_bytes / bytes_per_s;
      out.transferred_bytes += task.remaining_bytes;
      task.remaining_bytes = 0.0;
      task.finish_time = t + partial;
      out.latency = *task.finish_time - task.start_time;
      out.task = task;
      return out;
    }
    task.remaining_bytes -= step_bytes;
    out.transferred_bytes += step_bytes;
  }
  throw TimeoutError(fmt::format("offload of vehicle {} exceeded {} s horizon with {:.0f} bytes left",
                                 task.vehicle_id, options.horizon, task.remaining_bytes),
                     task.remaining_bytes);
}

OffloadResult simulate_offload(OffloadTask task, const VehicleTrajectory& vehicle,
                               const RadioEnvironment& env,
                               std::span<const std::size_t> background_load,
                               const OffloadOptions& options) {
  if (!background_load.empty() && background_load.size() != env.stations.size()) {
    throw InvalidInput(fmt::format("background load has {} entries for {} stations",
                                   background_load.size(), env.stations.size()));
  }
  const auto rate = [&](double t) {
    const Vec2 p = position_at(vehicle, t);
    const std::size_t station = associate(p, env);
    const std::size_t others = background_load.empty() ? 0 : background_load[station];
    return link_throughput(env, p, others + 1);
  };
  return integrate_offload(task, rate, options);
}

double crowdsource_time(const ViewpointSet& vs, std::span<const CaptureLine> contributors,
                        double rig_frame_rate, double horizon) {
  if (vs.poses.empty()) throw InvalidInput("viewpoint set is empty");
  double t = 0.0;
  if (vs.scenario == Scenario::Ideal || vs.scenario == Scenario::Disperse) {
    if (!(rig_frame_rate > 0.0)) throw InvalidInput("frame rate must be > 0");
    t = static_cast<double>(vs.poses.size()) / rig_frame_rate;
  } else {
    std::map<std::uint32_t, std::size_t> frames;
    for (const CameraPose& p : vs.poses) ++frames[p.contributor_id];
    for (const CaptureLine& line : contributors) {
      const auto it = frames.find(line.contributor_id);
      if (it == frames.end()) continue;
      if (!(line.frame_rate > 0.0) || !(line.speed >= 0.0)) {
        throw InvalidInput("capture line needs frame rate > 0 and speed >= 0");
      }
      double arrival = 0.0;
      if (line.approach_distance > 0.0) {
        arrival = line.speed > 0.0 ? line.approach_distance / line.speed
                                   : std::numeric_limits<double>::infinity();
      }
      const double done = arrival + static_cast<double>(it->second - 1) / line.frame_rate;
      if (!(done <= horizon)) {
        throw TimeoutError(fmt::format("contributor {} cannot finish capturing within {} s",
                                       line.contributor_id, horizon),
                           0.0);
      }
      t = std::max(t, done);
      frames.erase(it);
    }
    if (!frames.empty()) {
      throw InvalidInput(fmt::format("viewpoints reference contributor {} with no capture line",
                                     frames.begin()->first));
    }
  }
  if (!(t <= horizon)) throw TimeoutError("crowdsourcing exceeds the simulation horizon", 0.0);
  return t;
}

std::vector<CaptureLine> default_capture_lines(Scenario scenario, std::size_t n) {
  auto line = [](std::uint32_t id, double lateral, double approach, std::size_t frames) {
    CaptureLine l;
    l.contributor_id = id;
    l.direction = {1.0, 0.0, 0.0};
    l.speed = 10.0;
    l.frame_rate = 2.0;
    l.approach_distance = approach;
    // Centered on the target along x, camera height 1.5 m.
    const double half = 0.5 * static_cast<double>(frames > 0 ? frames - 1 : 0) * l.spacing();
    l.origin = {-half, lateral, 1.5};
    return l;
  };
  if (scenario == Scenario::Unbounded) return {line(0, -8.0, 0.0, n)};
  if (scenario == Scenario::Cooperative) {
    const std::size_t per = (n + 2) / 3;
    return {line(0, -6.0, 0.0, per), line(1, 10.0, 20.0, per), line(2, -14.0, 40.0, per)};
  }
  return {};
}

void StageLatencies::validate() const {
  if (!(induce_per_image >= 0.0) || !(segment_per_image >= 0.0) ||
      !(compress_per_image >= 0.0) || !(reconstruct_base >= 0.0)) {
    throw InvalidInput("stage latencies must be >= 0");
  }
}

SyncReport SyncReport::assemble(Scenario scenario, int q, std::uint64_t seed, double t_crowdsource,
                                double t_preprocess, double t_offload, double t_reconstruct,
                                double predicted_psnr) {
  if (!(t_crowdsource >= 0.0) || !(t_preprocess >= 0.0) || !(t_offload >= 0.0) ||
      !(t_reconstruct >= 0.0)) {
    throw InvalidInput("latency components must be >= 0");
  }
  SyncReport r;
  r.scenario = scenario;
  r.compression_q = q;
  r.seed = seed;
  r.t_crowdsource = t_crowdsource;
  r.t_preprocess = t_preprocess;
  r.t_offload = t_offload;
  r.t_reconstruct = t_reconstruct;
  r.t_total = t_crowdsource + t_preprocess + t_offload + t_reconstruct;
  r.predicted_psnr = predicted_psnr;
  return r;
}

Rect default_region(Area area, const RadioOverrides& radio) {
  const double isd = radio.inter_site_distance_m.value_or(preset_inter_site_distance(area));
  return Rect::centered({0.0, 0.0}, 3.0 * isd, 3.0 * isd);
}

std::uint64_t vehicle_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 finalizer over (seed, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PayloadOffload offload_payload(const EndToEndConfig& config, double payload_bytes) {
  if (config.vehicle_count < 1) throw InvalidInput("vehicle_count must be >= 1");
  const double share = payload_bytes / static_cast<double>(config.vehicle_count);

  const Rect region = config.region.value_or(default_region(config.area, config.radio));
  const RadioEnvironment env = make_environment(config.area, region, config.radio);
  std::vector<std::size_t> load = config.background_load;
  if (load.empty()) load.assign(env.stations.size(), config.background_users);

  PathParams path;
  path.region = region;
  path.speed_min = config.speed_min;
  path.speed_max = config.speed_max;
  path.duration = config.offload.horizon;
  path.timestep = config.mobility_timestep;

  PayloadOffload out;
  for (std::size_t v = 0; v < config.vehicle_count; ++v) {
    path.vehicle_id = static_cast<std::uint32_t>(v);
    out.vehicles.push_back(generate_path(vehicle_seed(config.seed, v), path));
    const OffloadTask task = OffloadTask::create(path.vehicle_id, share);
    const OffloadResult result =
        config.link_override_mbps
            ? integrate_offload(task, [rate = *config.link_override_mbps](double) { return rate; },
                                config.offload)
            : simulate_offload(task, out.vehicles.back(), env, load, config.offload);
    out.latency = std::max(out.latency, result.latency);
  }
  return out;
}

EndToEndRun simulate_end_to_end(const EndToEndConfig& config, const FidelityModel& fidelity) {
  if (config.vehicle_count < 1) throw InvalidInput("vehicle_count must be >= 1");
  config.stages.validate();
  EndToEndRun run;

  SamplingParams sampling = config.sampling;
  if (sampling.lines.empty()) {
    sampling.lines = default_capture_lines(config.scenario, config.image_count);
  }
  run.viewpoints = sample_viewpoints(config.scenario, config.image_count, sampling, config.seed);
  const double t_crowdsource = crowdsource_time(run.viewpoints, sampling.lines,
                                                sampling.rig_frame_rate, config.offload.horizon);

  const auto n = static_cast<double>(config.image_count);
  const double segment = config.mask ? config.stages.segment_per_image : 0.0;
  const double t_preprocess =
      n * (config.stages.induce_per_image + segment) + n * config.stages.compress_per_image;

  const double payload_bytes = compressed_size_mb(config.compression, config.q) * kBytesPerMb;
  PayloadOffload offload = offload_payload(config, payload_bytes);
  run.vehicles = std::move(offload.vehicles);

  const double psnr =
      fidelity.predict(config.scenario, config.mask, config.image_count, config.q);
  run.report = SyncReport::assemble(config.scenario, config.q, config.seed, t_crowdsource,
                                    t_preprocess, offload.latency, config.stages.reconstruct_base, psnr);
  return run;
}

SyncReport run_end_to_end(const EndToEndConfig& config, const FidelityModel& fidelity) {
  return simulate_end_to_end(config, fidelity).report;
}

void write_sync_report_header(std::ostream& os) {
  os << "scenario,q,seed,t_crowdsource,t_preprocess,t_offload,t_reconstruct,t_total,psnr_db\n";
}

void write_sync_report_row(const SyncReport& r, std::ostream& os) {
  os << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", to_string(r.scenario),
                    r.compression_q, r.seed, r.t_crowdsource, r.t_preprocess, r.t_offload,
                    r.t_reconstruct, r.t_total, r.predicted_psnr);
}

}  // namespace twinsim
