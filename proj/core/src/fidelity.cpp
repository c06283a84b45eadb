#include "twinsim/fidelity.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "twinsim/errors.hpp"

namespace twinsim {

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, std::size_t channels,
                         std::vector<std::uint32_t> samples, std::uint32_t levels)
    : width_(width), height_(height), channels_(channels), levels_(levels),
      samples_(std::move(samples)) {
  if (levels_ < 2) throw InvalidInput("an image needs at least 2 intensity levels");
  if (samples_.size() != width_ * height_ * channels_) {
    throw InvalidInput(fmt::format("expected {} samples, got {}", width_ * height_ * channels_,
                                   samples_.size()));
  }
  for (std::uint32_t v : samples_) {
    if (v >= levels_) throw InvalidInput(fmt::format("sample {} outside [0, {}]", v, levels_ - 1));
  }
}

double mse(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels() ||
      a.levels() != b.levels()) {
    throw InvalidInput("images differ in shape or intensity levels");
  }
  const auto& sa = a.samples();
  const auto& sb = b.samples();
  if (sa.empty()) throw InvalidInput("images are empty");
  long double sum = 0.0L;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const auto d = static_cast<long double>(static_cast<std::int64_t>(sa[i]) -
                                            static_cast<std::int64_t>(sb[i]));
    sum += d * d;
  }
  return static_cast<double>(sum / static_cast<long double>(sa.size()));
}

Psnr psnr_from_mse(double mse, std::uint32_t levels) {
  if (!(mse >= 0.0)) throw InvalidInput("MSE must be >= 0");
  if (mse == 0.0) return Psnr::infinite();
  const double peak = static_cast<double>(levels - 1);
  return Psnr(10.0 * std::log10(peak * peak / mse));
}

Psnr psnr(const ImageBuffer& a, const ImageBuffer& b) {
  return psnr_from_mse(mse(a, b), a.levels());
}

double fidelity_drop(double baseline_db, double degraded_db) {
  if (!(baseline_db > 0.0)) throw InvalidInput("baseline PSNR must be > 0");
  return 100.0 * (baseline_db - degraded_db) / baseline_db;
}

double compression_penalty_factor(int q) {
  if (q < 30 || q > 90) throw InvalidInput(fmt::format("compression parameter {} outside [30, 90]", q));
  return 1.0 - kMaxCompressionPenalty * static_cast<double>(90 - q) / 60.0;
}

FidelityModel::FidelityModel(std::vector<FidelityRecord> records) : records_(std::move(records)) {
  if (records_.empty()) throw ConfigError("fidelity calibration table is empty");
  for (const FidelityRecord& r : records_) {
    if (!(r.psnr_db > 0.0) || !std::isfinite(r.psnr_db)) {
      throw InvalidInput("calibration PSNR must be finite and positive");
    }
  }
}

FidelityModel FidelityModel::defaults() {
  return FidelityModel({
      {Scenario::Ideal, true, 100, 36.79},
      {Scenario::Disperse, false, 16, 34.37},
      {Scenario::Disperse, true, 16, 37.89},
      {Scenario::Unbounded, false, 45, 14.80},
      {Scenario::Unbounded, true, 45, 17.25},
  });
}

FidelityModel FidelityModel::from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "scenario,mask,image_count,psnr_db") {
    throw ConfigError("calibration CSV must start with header scenario,mask,image_count,psnr_db");
  }
  std::vector<FidelityRecord> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string scenario, mask, count, value;
    std::getline(fields, scenario, ',');
    std::getline(fields, mask, ',');
    std::getline(fields, count, ',');
    std::getline(fields, value);
    try {
      FidelityRecord r;
      r.scenario = parse_scenario(scenario);
      if (mask != "true" && mask != "false") throw InvalidInput("mask must be true or false");
      r.mask = mask == "true";
      r.image_count = std::stoul(count);
      r.psnr_db = std::stod(value);
      rows.push_back(r);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("calibration CSV line {}: {}", lineno, e.what()));
    }
  }
  return FidelityModel(std::move(rows));
}

FidelityModel FidelityModel::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open calibration table " + path.string());
  return from_csv(is);
}

const FidelityRecord& FidelityModel::lookup(Scenario scenario, bool mask,
                                            std::size_t image_count) const {
  auto nearest = [&](Scenario s, bool m) -> const FidelityRecord* {
    const FidelityRecord* best = nullptr;
    std::size_t best_gap = std::numeric_limits<std::size_t>::max();
    for (const FidelityRecord& r : records_) {
      if (r.scenario != s || r.mask != m) continue;
      const std::size_t gap =
          r.image_count > image_count ? r.image_count - image_count : image_count - r.image_count;
      if (gap < best_gap || (gap == best_gap && r.image_count < best->image_count)) {
        best = &r;
        best_gap = gap;
      }
    }
    return best;
  };

  if (const auto* r = nearest(scenario, mask)) return *r;
  if (const auto* r = nearest(scenario, !mask)) return *r;
  if (scenario == Scenario::Cooperative) {
    if (const auto* r = nearest(Scenario::Unbounded, true)) return *r;
    if (const auto* r = nearest(Scenario::Unbounded, false)) return *r;
  }
  throw ConfigError(fmt::format("no calibration rows for scenario {}", to_string(scenario)));
}

double FidelityModel::predict(Scenario scenario, bool mask, std::size_t image_count, int q) const {
  const double factor = compression_penalty_factor(q);
  return lookup(scenario, mask, image_count).psnr_db * factor;
}

double predict_fidelity(const FidelityModel& model, Scenario scenario, bool mask,
                        std::size_t image_count, int q) {
  return model.predict(scenario, mask, image_count, q);
}

void write_calibration_csv(const std::vector<FidelityRecord>& records, std::ostream& os) {
  os << "scenario,mask,image_count,psnr_db\n";
  for (const FidelityRecord& r : records) {
    os << fmt::format("{},{},{},{:.2f}\n", to_string(r.scenario), r.mask ? "true" : "false",
                      r.image_count, r.psnr_db);
  }
}

}  // namespace twinsim
