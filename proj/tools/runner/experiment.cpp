#include "experiment.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "twinsim/errors.hpp"
#include "twinsim/manifest.hpp"
#include "twinsim/mobility.hpp"
#include "twinsim/radio.hpp"
#include "twinsim/selection.hpp"

namespace twinsim::runner {

namespace {

// Calls fn(i) for i in [0, n) on a small worker pool. The first exception by
// index is rethrown, so failures are reported the same way on every run.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

class OutputFile {
 public:
  OutputFile(const std::filesystem::path& path, std::vector<std::filesystem::path>& written)
      : path_(path), os_(path, std::ios::binary) {
    if (!os_) throw IoError("cannot open " + path.string() + " for writing");
    written.push_back(path);
  }
  ~OutputFile() = default;

  std::ostream& stream() { return os_; }

  void close() {
    os_.close();
    if (!os_) throw IoError("failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream os_;
};

void run_heatmaps(const ExperimentConfig& config, const std::filesystem::path& dir,
                  std::vector<std::filesystem::path>& written) {
  for (Area area : config.areas) {
    const EndToEndConfig cell = config.end_to_end(area, kMaxQuality, config.seeds.front());
    const Rect region = cell.region.value_or(default_region(area, cell.radio));
    const RadioEnvironment env = make_environment(area, region, cell.radio);
    const double cell_size =
        config.overrides.heatmap_cell_m.value_or(env.inter_site_distance_m / 20.0);
    const Heatmap map = heatmap(env, cell_size, config.overrides.heatmap_sharing);
    OutputFile file(dir / fmt::format("heatmap_{}.csv", to_string(area)), written);
    write_heatmap_csv(map, file.stream());
    file.close();
  }
}

void run_fidelity_table(const ExperimentConfig& config, const std::filesystem::path& dir,
                        std::vector<std::filesystem::path>& written) {
  const FidelityModel model = load_fidelity(config);
  {
    OutputFile file(dir / "fidelity_table.csv", written);
    write_calibration_csv(model.records(), file.stream());
    file.close();
  }
  OutputFile file(dir / "fidelity_drops.csv", written);
  file.stream() << "baseline_scenario,baseline_mask,baseline_psnr_db,degraded_scenario,"
                   "degraded_mask,degraded_psnr_db,drop_pct\n";
  for (const DropRow& d : fidelity_drops(model)) {
    file.stream() << fmt::format("{},{},{:.2f},{},{},{:.2f},{:.2f}\n",
                                 to_string(d.baseline.scenario), d.baseline.mask,
                                 d.baseline.psnr_db, to_string(d.degraded.scenario),
                                 d.degraded.mask, d.degraded.psnr_db, d.drop_pct);
  }
  file.close();
}

void run_sweep(const ExperimentConfig& config, const std::filesystem::path& dir,
               std::vector<std::filesystem::path>& written) {
  const SweepResult sweep = run_tradeoff_sweep(config, load_fidelity(config));
  {
    OutputFile file(dir / "tradeoff_sweep.csv", written);
    file.stream() << "area,q,compressed_size_mb,mean_latency_s,min_latency_s,max_latency_s,"
                     "psnr_db\n";
    for (const SweepRow& r : sweep.rows) {
      file.stream() << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", to_string(r.area),
                                   r.q, r.size_mb, r.mean_latency, r.min_latency, r.max_latency,
                                   r.psnr_db);
    }
    file.close();
  }
  OutputFile file(dir / "tradeoff_runs.csv", written);
  file.stream() << "area,q,seed,t_offload\n";
  for (const SweepRun& r : sweep.runs) {
    file.stream() << fmt::format("{},{},{},{:.6f}\n", to_string(r.area), r.q, r.seed, r.latency);
  }
  file.close();
}

void run_end_to_end_experiment(const ExperimentConfig& config, const std::filesystem::path& dir,
                               std::vector<std::filesystem::path>& written) {
  const FidelityModel fidelity = load_fidelity(config);
  const Area area = config.areas.front();
  const std::size_t per_seed = config.q_values.size();
  std::vector<EndToEndRun> runs(per_seed * config.seeds.size());
  parallel_for(runs.size(), [&](std::size_t i) {
    const std::uint64_t seed = config.seeds[i / per_seed];
    const int q = config.q_values[i % per_seed];
    runs[i] = simulate_end_to_end(config.end_to_end(area, q, seed), fidelity);
  });

  {
    OutputFile file(dir / "sync_report.csv", written);
    write_sync_report_header(file.stream());
    for (const EndToEndRun& run : runs) write_sync_report_row(run.report, file.stream());
    file.close();
  }
  // Viewpoints and vehicle paths depend on the seed only.
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    const EndToEndRun& run = runs[s * per_seed];
    const std::uint64_t seed = config.seeds[s];
    const auto manifest = dir / fmt::format("transforms_seed{}.json", seed);
    write_transforms_manifest(run.viewpoints, manifest, config.overrides.camera_angle_x);
    written.push_back(manifest);
    OutputFile file(dir / fmt::format("trajectories_seed{}.csv", seed), written);
    write_trajectory_csv(run.vehicles, file.stream());
    file.close();
  }
}

void run_selection(const ExperimentConfig& config, const std::filesystem::path& dir,
                   std::vector<std::filesystem::path>& written) {
  const Overrides& o = config.overrides;
  const TopologyScenario topology = TopologyScenario::preset(o.topology);
  for (std::uint64_t seed : config.seeds) {
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < o.selection_candidates; ++i) {
      Candidate c;
      c.contributor_id = static_cast<std::uint32_t>(i);
      c.planned = generate_topology_viewpoints(topology, o.selection_views, vehicle_seed(seed, i));
      candidates.push_back(std::move(c));
    }
    OutputFile file(dir / fmt::format("selection_report_seed{}.csv", seed), written);
    write_selection_report_header(file.stream());
    for (auto policy :
         {SelectionPolicy::All, SelectionPolicy::RandomK, SelectionPolicy::GreedyCoverage}) {
      const std::size_t k = policy == SelectionPolicy::All ? candidates.size() : o.selection_k;
      write_selection_report_row(policy, k, select_contributors(candidates, k, policy, seed),
                                 file.stream());
    }
    file.close();
  }
}

}  // namespace

FidelityModel load_fidelity(const ExperimentConfig& config) {
  if (config.overrides.calibration) return FidelityModel::load(*config.overrides.calibration);
  return FidelityModel::defaults();
}

std::vector<DropRow> fidelity_drops(const FidelityModel& fidelity) {
  std::vector<DropRow> out;
  for (const FidelityRecord& base : fidelity.records()) {
    if (base.scenario != Scenario::Ideal && base.scenario != Scenario::Disperse) continue;
    for (const FidelityRecord& deg : fidelity.records()) {
      if (deg.scenario != Scenario::Unbounded || deg.mask != base.mask) continue;
      out.push_back({base, deg, fidelity_drop(base.psnr_db, deg.psnr_db)});
    }
  }
  return out;
}

SweepResult run_tradeoff_sweep(const ExperimentConfig& config, const FidelityModel& fidelity) {
  const std::size_t nq = config.q_values.size();
  const std::size_t ns = config.seeds.size();
  std::vector<double> latency(config.areas.size() * nq * ns);
  parallel_for(latency.size(), [&](std::size_t i) {
    const Area area = config.areas[i / (nq * ns)];
    const int q = config.q_values[(i / ns) % nq];
    const std::uint64_t seed = config.seeds[i % ns];
    const EndToEndConfig cell = config.end_to_end(area, q, seed);
    latency[i] = offload_payload(cell, compressed_size_mb(cell.compression, q) * kBytesPerMb).latency;
  });

  SweepResult out;
  for (std::size_t a = 0; a < config.areas.size(); ++a) {
    for (std::size_t qi = 0; qi < nq; ++qi) {
      const int q = config.q_values[qi];
      SweepRow row;
      row.area = config.areas[a];
      row.q = q;
      row.size_mb = compressed_size_mb(config.overrides.compression, q);
      row.psnr_db = fidelity.predict(config.scenario, config.overrides.mask, config.image_count(), q);
      row.min_latency = std::numeric_limits<double>::infinity();
      row.max_latency = 0.0;
      double sum = 0.0;
      for (std::size_t s = 0; s < ns; ++s) {
        const double l = latency[(a * nq + qi) * ns + s];
        out.runs.push_back({row.area, q, config.seeds[s], l});
        sum += l;
        row.min_latency = std::min(row.min_latency, l);
        row.max_latency = std::max(row.max_latency, l);
      }
      row.mean_latency = sum / static_cast<double>(ns);
      out.rows.push_back(row);
    }
  }
  return out;
}

std::vector<std::filesystem::path> run_experiment(ExperimentConfig config,
                                                  const RunOptions& options) {
  if (options.output_dir) config.output_dir = *options.output_dir;
  if (options.seed) config.seeds = {*options.seed};

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", config.output_dir.string(), ec.message()));

  std::vector<std::filesystem::path> written;
  switch (config.experiment) {
    case ExperimentKind::Heatmap:
      run_heatmaps(config, config.output_dir, written);
      break;
    case ExperimentKind::FidelityTable:
      run_fidelity_table(config, config.output_dir, written);
      break;
    case ExperimentKind::TradeoffSweep:
      run_sweep(config, config.output_dir, written);
      break;
    case ExperimentKind::EndToEnd:
      run_end_to_end_experiment(config, config.output_dir, written);
      break;
    case ExperimentKind::Selection:
      run_selection(config, config.output_dir, written);
      break;
  }
  if (options.log) {
    for (const auto& path : written) *options.log << "wrote " << path.string() << "\n";
  }
  return written;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mobility digital twin visualization pipeline simulator"};
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  bool quiet = false;
  bool validate_only = false;
  app.add_option("--config", config_path, "Experiment configuration (YAML)")->required();
  app.add_option("--out", out_dir, "Output directory, overrides output_dir");
  app.add_option("--seed", seed, "Run with this single seed instead of the configured list")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", quiet, "Suppress progress output");
  app.add_flag("--validate", validate_only, "Check the configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help;
    const int code = app.exit(e, help, help);
    (code == 0 ? out : err) << help.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const ValidationResult validation = validate_config(config_path);
    if (!validation.ok()) {
      for (const Diagnostic& d : validation.diagnostics) {
        err << format_diagnostic(config_path, d) << "\n";
      }
      return kExitConfig;
    }
    if (validate_only) {
      if (!quiet) out << config_path << ": ok\n";
      return kExitOk;
    }
    RunOptions options;
    if (!out_dir.empty()) options.output_dir = out_dir;
    if (seed >= 0) options.seed = static_cast<std::uint64_t>(seed);
    if (!quiet) options.log = &out;
    run_experiment(*validation.config, options);
    return kExitOk;
  } catch (const TimeoutError& e) {
    err << "timeout: " << e.what() << "\n";
    return kExitTimeout;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInput& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace twinsim::runner
