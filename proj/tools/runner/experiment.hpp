#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "config.hpp"
#include "twinsim/fidelity.hpp"

namespace twinsim::runner {

struct SweepRow {
  Area area = Area::Urban;
  int q = kMaxQuality;
  double size_mb = 0.0;
  double mean_latency = 0.0;
  double min_latency = 0.0;
  double max_latency = 0.0;
  double psnr_db = 0.0;
};

struct SweepRun {
  Area area = Area::Urban;
  int q = kMaxQuality;
  std::uint64_t seed = 0;
  double latency = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (area, q) as configured
  std::vector<SweepRun> runs;  // ordered by (area, q, seed)
};

/// Offload latency of the compressed image set for every (area, q, seed).
/// Cells run in parallel; results are assembled in configuration order.
SweepResult run_tradeoff_sweep(const ExperimentConfig& config, const FidelityModel& fidelity);

struct DropRow {
  FidelityRecord baseline;
  FidelityRecord degraded;
  double drop_pct = 0.0;
};

/// Fidelity loss of Unbounded sampling against each hemisphere row with the same mask state.
std::vector<DropRow> fidelity_drops(const FidelityModel& fidelity);

FidelityModel load_fidelity(const ExperimentConfig& config);

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::ostream* log = nullptr;  // progress lines; null for quiet
};

/// Runs the configured experiment and returns the files written, in order.
/// Throws TimeoutError, IoError, or InvalidInput from the simulation.
std::vector<std::filesystem::path> run_experiment(ExperimentConfig config,
                                                  const RunOptions& options = {});

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitTimeout = 3,
  kExitIo = 4,
};

/// Command-line entry point: --config, --out, --seed, --quiet, --validate.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace twinsim::runner
