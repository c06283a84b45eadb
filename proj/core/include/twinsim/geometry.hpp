#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "twinsim/vec.hpp"

namespace twinsim {

enum class Scenario { Ideal, Disperse, Unbounded, Cooperative };

std::string_view to_string(Scenario s);
/// Accepts the lowercase names produced by to_string. Throws InvalidInput.
Scenario parse_scenario(std::string_view name);

/// Unit quaternion; the constructor normalizes and rejects zero or non-finite input.
class Quaternion {
 public:
  Quaternion() = default;
  Quaternion(double w, double x, double y, double z);

  static Quaternion identity() { return {}; }

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  friend bool operator==(const Quaternion&, const Quaternion&) = default;

 private:
  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// 4x4 homogeneous matrix, row-major.
class Matrix4 {
 public:
  Matrix4() = default;
  explicit Matrix4(const std::array<double, 16>& entries) : m_(entries) {}

  static Matrix4 identity();

  double operator()(std::size_t row, std::size_t col) const { return m_[row * 4 + col]; }
  double& operator()(std::size_t row, std::size_t col) { return m_[row * 4 + col]; }

  const std::array<double, 16>& entries() const { return m_; }

  friend bool operator==(const Matrix4&, const Matrix4&) = default;

 private:
  std::array<double, 16> m_{};
};

struct CameraPose {
  Quaternion orientation;
  Vec3 translation;
  Vec3 scale{1.0, 1.0, 1.0};
  double timestamp = 0.0;
  std::uint32_t contributor_id = 0;

  /// Throws InvalidInput on non-positive scale or negative timestamp.
  void validate() const;
};

struct ViewpointSet {
  std::vector<CameraPose> poses;
  Vec3 target_center;
  double target_radius = 1.0;
  Scenario scenario = Scenario::Ideal;
};

Matrix3 quat_to_rotation(const Quaternion& q);

Matrix4 translation_matrix(Vec3 t);

/// diag(sx, sy, sz, 1). Throws InvalidInput unless every component is > 0.
Matrix4 scaling_matrix(Vec3 s);

/// M = T * R * S, with R embedded in the upper-left block of a homogeneous 4x4.
Matrix4 compose_camera_matrix(const CameraPose& pose);

// Cameras look along their local -z axis.
Vec3 look_direction(const Quaternion& q);

/// Orientation whose -z axis points from eye to target, +y as close to world +z
/// as possible. Falls back to world +y as up hint when looking straight up/down.
Quaternion look_at(Vec3 eye, Vec3 target);

/// Shepperd's method. Input must be a proper rotation.
Quaternion rotation_to_quat(const Matrix3& r);

// One vehicle capturing along a straight path. Frames are spaced speed /
// frame_rate apart starting at origin; the vehicle begins approach_distance
// before origin.
struct CaptureLine {
  std::uint32_t contributor_id = 0;
  Vec3 origin;
  Vec3 direction{1.0, 0.0, 0.0};
  double speed = 10.0;
  double frame_rate = 2.0;
  double approach_distance = 0.0;

  double spacing() const { return speed / frame_rate; }
};

struct SamplingParams {
  Vec3 target_center;
  double target_radius = 1.0;
  // Ideal / Disperse
  double radius = 4.0;
  double cap_angle_deg = 30.0;
  double rig_frame_rate = 2.0;
  // Unbounded uses lines[0]; Cooperative splits n across all lines.
  std::vector<CaptureLine> lines;
};

/// Generates n poses for the scenario, all oriented toward target_center.
/// Throws InvalidInput for n == 0, non-positive radius, or malformed lines.
ViewpointSet sample_viewpoints(Scenario scenario, std::size_t n, const SamplingParams& params,
                               std::uint64_t seed);

struct CoverageSummary {
  double azimuth_fraction = 0.0;
  double max_gap_deg = 0.0;
  std::size_t distinct_views = 0;
};

constexpr std::size_t kDefaultAzimuthBins = 36;

// Occupancy of equal azimuth sectors around the target center, in the xy plane.
std::vector<bool> azimuth_bins(const ViewpointSet& vs, std::size_t bins = kDefaultAzimuthBins);

double azimuth_deg(Vec3 position, Vec3 center);

CoverageSummary coverage_metrics(const ViewpointSet& vs, std::size_t bins = kDefaultAzimuthBins);

}  // namespace twinsim
