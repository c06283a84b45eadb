#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "twinsim/fidelity.hpp"
#include "twinsim/geometry.hpp"
#include "twinsim/mobility.hpp"
#include "twinsim/radio.hpp"

namespace twinsim {

constexpr double kBytesPerMb = 1e6;

// Log-linear size model between the sizes measured at q = 90 and q = 30.
struct CompressionProfile {
  double size_max_mb = 18.0;
  double size_min_mb = 6.0;

  void validate() const;
};

constexpr int kMinQuality = 30;
constexpr int kMaxQuality = 90;

/// size(q) = max * (min / max)^((90 - q) / 60). Throws InvalidInput for q outside [30, 90].
double compressed_size_mb(const CompressionProfile& profile, int q);

struct OffloadTask {
  std::uint32_t vehicle_id = 0;
  double total_bytes = 0.0;
  double remaining_bytes = 0.0;
  double start_time = 0.0;
  std::optional<double> finish_time;

  static OffloadTask create(std::uint32_t vehicle_id, double bytes, double start_time = 0.0);
};

struct OffloadOptions {
  double timestep = 0.01;  // s
  double horizon = 600.0;  // s after start_time
};

struct OffloadResult {
  double latency = 0.0;
  OffloadTask task;
  double transferred_bytes = 0.0;
  std::size_t steps = 0;
};

/// Link rate in Mbps as a function of absolute time.
using RateFunction = std::function<double(double)>;

// Fixed-step integration of rate over time until the payload is drained. The
// last step is cut short at the exact instant the remaining bytes run out.
// Throws TimeoutError carrying the remaining bytes when the horizon passes first.
OffloadResult integrate_offload(OffloadTask task, const RateFunction& rate_mbps,
                                const OffloadOptions& options = {});

/// Offload from a moving vehicle. Each step the vehicle associates with its
/// nearest station and shares it with background_load[station] other users.
/// An empty background_load means no other users anywhere.
OffloadResult simulate_offload(OffloadTask task, const VehicleTrajectory& vehicle,
                               const RadioEnvironment& env,
                               std::span<const std::size_t> background_load,
                               const OffloadOptions& options = {});

/// Time until the last viewpoint is captured. Hemisphere scenarios model a
/// stationary rig: n / rig_frame_rate. Line scenarios take the slowest
/// contributor: approach time plus (frames - 1) / frame_rate.
double crowdsource_time(const ViewpointSet& vs, std::span<const CaptureLine> contributors,
                        double rig_frame_rate,
                        double horizon = std::numeric_limits<double>::infinity());

/// Capture lines used when a configuration does not provide any: one line
/// passing 8 m from the target for Unbounded, three staggered lines for Cooperative.
std::vector<CaptureLine> default_capture_lines(Scenario scenario, std::size_t n);

struct StageLatencies {
  double induce_per_image = 0.05;
  double segment_per_image = 0.15;
  double compress_per_image = 0.02;
  double reconstruct_base = 30.0;

  void validate() const;
};

struct SyncReport {
  Scenario scenario = Scenario::Ideal;
  int compression_q = kMaxQuality;
  std::uint64_t seed = 0;
  double t_crowdsource = 0.0;
  double t_preprocess = 0.0;
  double t_offload = 0.0;
  double t_reconstruct = 0.0;
  double t_total = 0.0;
  double predicted_psnr = 0.0;

  /// Fills t_total from the four components. Throws InvalidInput on negatives.
  static SyncReport assemble(Scenario scenario, int q, std::uint64_t seed, double t_crowdsource,
                             double t_preprocess, double t_offload, double t_reconstruct,
                             double predicted_psnr);

  friend bool operator==(const SyncReport&, const SyncReport&) = default;
};

struct EndToEndConfig {
  Scenario scenario = Scenario::Unbounded;
  bool mask = true;
  std::size_t image_count = 45;
  int q = kMaxQuality;
  std::uint64_t seed = 1;

  SamplingParams sampling;  // empty lines fall back to default_capture_lines

  Area area = Area::Urban;
  RadioOverrides radio;
  std::optional<Rect> region;                // default: square of 3 inter-site distances
  std::size_t background_users = 0;          // per station, unless background_load is given
  std::vector<std::size_t> background_load;  // per station

  double speed_min = 8.0;
  double speed_max = 16.0;
  double mobility_timestep = 1.0;
  // Contributors split the payload evenly and upload in parallel.
  std::size_t vehicle_count = 1;

  CompressionProfile compression;
  StageLatencies stages;
  OffloadOptions offload;
  std::optional<double> link_override_mbps;  // constant rate instead of the radio model
};

struct EndToEndRun {
  SyncReport report;
  ViewpointSet viewpoints;
  std::vector<VehicleTrajectory> vehicles;
};

/// Region used when the configuration leaves it unset.
Rect default_region(Area area, const RadioOverrides& radio);

/// Derives the seed for vehicle `index` of a run seeded with `seed`.
std::uint64_t vehicle_seed(std::uint64_t seed, std::size_t index);

struct PayloadOffload {
  double latency = 0.0;  // slowest vehicle
  std::vector<VehicleTrajectory> vehicles;
};

/// Offload stage of an end-to-end run: vehicle_count random-waypoint vehicles
/// each upload an equal share of payload_bytes starting at t = 0.
PayloadOffload offload_payload(const EndToEndConfig& config, double payload_bytes);

EndToEndRun simulate_end_to_end(const EndToEndConfig& config, const FidelityModel& fidelity);

SyncReport run_end_to_end(const EndToEndConfig& config, const FidelityModel& fidelity);

// CSV scenario,q,seed,t_crowdsource,t_preprocess,t_offload,t_reconstruct,t_total,psnr_db.
// All times are for the whole compressed image set, not per image.
void write_sync_report_header(std::ostream& os);
void write_sync_report_row(const SyncReport& report, std::ostream& os);

}  // namespace twinsim
