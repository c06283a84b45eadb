#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "twinsim/geometry.hpp"

namespace twinsim {

/// Interleaved integer samples with `levels` intensity levels (256 for 8-bit).
class ImageBuffer {
 public:
  /// Throws InvalidInput if the sample count or any sample value is out of range.
  ImageBuffer(std::size_t width, std::size_t height, std::size_t channels,
              std::vector<std::uint32_t> samples, std::uint32_t levels = 256);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t channels() const { return channels_; }
  std::uint32_t levels() const { return levels_; }
  const std::vector<std::uint32_t>& samples() const { return samples_; }

 private:
  std::size_t width_;
  std::size_t height_;
  std::size_t channels_;
  std::uint32_t levels_;
  std::vector<std::uint32_t> samples_;
};

/// PSNR in dB. Identical images have no finite PSNR; that case is represented
/// by infinite() rather than an error.
class Psnr {
 public:
  explicit Psnr(double db) : db_(db) {}
  static Psnr infinite() { return Psnr(std::numeric_limits<double>::infinity()); }

  bool is_infinite() const { return db_ == std::numeric_limits<double>::infinity(); }
  double db() const { return db_; }

  friend bool operator==(const Psnr&, const Psnr&) = default;

 private:
  double db_;
};

/// Mean squared per-sample difference. Throws InvalidInput on shape or level mismatch.
double mse(const ImageBuffer& a, const ImageBuffer& b);

/// 10 log10((L-1)^2 / mse); mse == 0 gives Psnr::infinite().
Psnr psnr_from_mse(double mse, std::uint32_t levels);

Psnr psnr(const ImageBuffer& a, const ImageBuffer& b);

/// Percentage drop 100 (baseline - degraded) / baseline. Baseline must be > 0.
double fidelity_drop(double baseline_db, double degraded_db);

struct FidelityRecord {
  Scenario scenario = Scenario::Ideal;
  bool mask = false;
  std::size_t image_count = 0;
  double psnr_db = 0.0;
};

// Worst-case relative PSNR loss at the strongest compression (q = 30).
constexpr double kMaxCompressionPenalty = 0.001;

/// Multiplier applied to calibrated PSNR for compression parameter q.
double compression_penalty_factor(int q);

/// Lookup table of measured reconstruction PSNR. Immutable once built.
class FidelityModel {
 public:
  /// Throws ConfigError for an empty table and InvalidInput for bad rows.
  explicit FidelityModel(std::vector<FidelityRecord> records);

  /// The five reference measurements shipped with the simulator.
  static FidelityModel defaults();

  static FidelityModel from_csv(std::istream& is);
  static FidelityModel load(const std::filesystem::path& path);

  const std::vector<FidelityRecord>& records() const { return records_; }

  /// Calibrated row for (scenario, mask), nearest image_count on a miss
  /// (smaller count on ties). Cooperative without rows of its own uses the
  /// masked Unbounded row; a mask state without rows uses the other mask state.
  const FidelityRecord& lookup(Scenario scenario, bool mask, std::size_t image_count) const;

  /// lookup(...).psnr_db scaled by compression_penalty_factor(q). q in [30, 90].
  double predict(Scenario scenario, bool mask, std::size_t image_count, int q) const;

 private:
  std::vector<FidelityRecord> records_;
};

double predict_fidelity(const FidelityModel& model, Scenario scenario, bool mask,
                        std::size_t image_count, int q);

// CSV scenario,mask,image_count,psnr_db (PSNR with 2 decimals).
void write_calibration_csv(const std::vector<FidelityRecord>& records, std::ostream& os);

}  // namespace twinsim
