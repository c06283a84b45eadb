#include "twinsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <tuple>

#include "twinsim/errors.hpp"
#include "twinsim/random.hpp"

namespace twinsim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kGoldenAngle = std::numbers::pi * (3.0 - 2.2360679774997896964);

Vec3 normalized(Vec3 v) {
  const double n = norm(v);
  return (1.0 / n) * v;
}

void check_line(const CaptureLine& line) {
  if (!(line.speed > 0.0) || !(line.frame_rate > 0.0)) {
    throw InvalidInput("capture line needs positive speed and frame rate");
  }
  if (!(norm(line.direction) > 0.0)) {
    throw InvalidInput("capture line direction must be non-zero");
  }
  if (!(line.approach_distance >= 0.0)) {
    throw InvalidInput("capture line approach distance must be >= 0");
  }
}

CameraPose pose_looking_at(Vec3 eye, Vec3 target, double timestamp, std::uint32_t contributor) {
  if (eye == target) {
    throw InvalidInput("camera position coincides with the target center");
  }
  CameraPose pose;
  pose.orientation = look_at(eye, target);
  pose.translation = eye;
  pose.timestamp = timestamp;
  pose.contributor_id = contributor;
  return pose;
}

// Fibonacci spiral over the band cos(polar) in [0, max_cos], rotated by a
// seeded azimuth offset. Equal-area spacing in cos(polar).
void sample_hemisphere(ViewpointSet& vs, std::size_t n, const SamplingParams& p, double max_cos,
                       double jitter_rad, Rng& rng) {
  const double offset = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    const double cz = max_cos * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double sz = std::sqrt(1.0 - cz * cz);
    double phi = offset + kGoldenAngle * static_cast<double>(i);
    if (jitter_rad > 0.0) phi += rng.uniform(-jitter_rad, jitter_rad);
    const Vec3 eye = p.target_center + p.radius * Vec3{sz * std::cos(phi), sz * std::sin(phi), cz};
    vs.poses.push_back(
        pose_looking_at(eye, p.target_center, static_cast<double>(i) / p.rig_frame_rate, 0));
  }
}

void sample_line(ViewpointSet& vs, const CaptureLine& line, std::size_t frames, Vec3 target) {
  const Vec3 dir = normalized(line.direction);
  const double spacing = line.spacing();
  const double arrival = line.approach_distance / line.speed;
  for (std::size_t i = 0; i < frames; ++i) {
    const double k = static_cast<double>(i);
    const Vec3 eye = line.origin + (k * spacing) * dir;
    vs.poses.push_back(
        pose_looking_at(eye, target, arrival + k / line.frame_rate, line.contributor_id));
  }
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::Ideal:
      return "ideal";
    case Scenario::Disperse:
      return "disperse";
    case Scenario::Unbounded:
      return "unbounded";
    case Scenario::Cooperative:
      return "cooperative";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::Ideal, Scenario::Disperse, Scenario::Unbounded,
                     Scenario::Cooperative}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidInput("unknown scenario '" + std::string(name) + "'");
}

Quaternion::Quaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidInput("quaternion must have finite non-zero norm");
  }
  w_ = w / n;
  x_ = x / n;
  y_ = y / n;
  z_ = z / n;
}

Matrix4 Matrix4::identity() {
  return Matrix4({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
}

void CameraPose::validate() const {
  if (!(scale.x > 0.0) || !(scale.y > 0.0) || !(scale.z > 0.0)) {
    throw InvalidInput("pose scale components must be > 0");
  }
  if (!(timestamp >= 0.0)) throw InvalidInput("pose timestamp must be >= 0");
}

Matrix3 quat_to_rotation(const Quaternion& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  return {{
      {1 - 2 * y * y - 2 * z * z, 2 * x * y - 2 * z * w, 2 * x * z + 2 * y * w},
      {2 * x * y + 2 * z * w, 1 - 2 * x * x - 2 * z * z, 2 * y * z - 2 * x * w},
      {2 * x * z - 2 * y * w, 2 * y * z + 2 * x * w, 1 - 2 * x * x - 2 * y * y},
  }};
}

Matrix4 translation_matrix(Vec3 t) {
  Matrix4 m = Matrix4::identity();
  m(0, 3) = t.x;
  m(1, 3) = t.y;
  m(2, 3) = t.z;
  return m;
}

Matrix4 scaling_matrix(Vec3 s) {
  if (!(s.x > 0.0) || !(s.y > 0.0) || !(s.z > 0.0)) {
    throw InvalidInput("scale components must be > 0");
  }
  Matrix4 m = Matrix4::identity();
  m(0, 0) = s.x;
  m(1, 1) = s.y;
  m(2, 2) = s.z;
  return m;
}

Matrix4 compose_camera_matrix(const CameraPose& pose) {
  pose.validate();
  // T * R4 * S collapses to [R * diag(s) | t].
  const Matrix3 r = quat_to_rotation(pose.orientation);
  const std::array<double, 3> s{pose.scale.x, pose.scale.y, pose.scale.z};
  const std::array<double, 3> t{pose.translation.x, pose.translation.y, pose.translation.z};
  Matrix4 m = Matrix4::identity();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = r[i][j] * s[j];
    m(i, 3) = t[i];
  }
  return m;
}

Vec3 look_direction(const Quaternion& q) {
  const Matrix3 r = quat_to_rotation(q);
  return {-r[0][2], -r[1][2], -r[2][2]};
}

Quaternion look_at(Vec3 eye, Vec3 target) {
  const Vec3 forward = normalized(target - eye);
  Vec3 up_hint{0.0, 0.0, 1.0};
  if (norm(cross(forward, up_hint)) < 1e-9) up_hint = {0.0, 1.0, 0.0};
  const Vec3 right = normalized(cross(forward, up_hint));
  const Vec3 up = cross(right, forward);
  const Vec3 back = -1.0 * forward;
  const Matrix3 r{{
      {right.x, up.x, back.x},
      {right.y, up.y, back.y},
      {right.z, up.z, back.z},
  }};
  return rotation_to_quat(r);
}

Quaternion rotation_to_quat(const Matrix3& r) {
  const double trace = r[0][0] + r[1][1] + r[2][2];
  if (trace > 0.0) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    return {0.25 * s, (r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s};
  }
  if (r[0][0] > r[1][1] && r[0][0] > r[2][2]) {
    const double s = 2.0 * std::sqrt(1.0 + r[0][0] - r[1][1] - r[2][2]);
    return {(r[2][1] - r[1][2]) / s, 0.25 * s, (r[0][1] + r[1][0]) / s, (r[0][2] + r[2][0]) / s};
  }
  if (r[1][1] > r[2][2]) {
    const double s = 2.0 * std::sqrt(1.0 + r[1][1] - r[0][0] - r[2][2]);
    return {(r[0][2] - r[2][0]) / s, (r[0][1] + r[1][0]) / s, 0.25 * s, (r[1][2] + r[2][1]) / s};
  }
  const double s = 2.0 * std::sqrt(1.0 + r[2][2] - r[0][0] - r[1][1]);
  return {(r[1][0] - r[0][1]) / s, (r[0][2] + r[2][0]) / s, (r[1][2] + r[2][1]) / s, 0.25 * s};
}

ViewpointSet sample_viewpoints(Scenario scenario, std::size_t n, const SamplingParams& params,
                               std::uint64_t seed) {
  if (n == 0) throw InvalidInput("viewpoint count must be >= 1");
  if (!(params.target_radius >= 0.0)) throw InvalidInput("target radius must be >= 0");

  ViewpointSet vs;
  vs.scenario = scenario;
  vs.target_center = params.target_center;
  vs.target_radius = params.target_radius;
  vs.poses.reserve(n);
  Rng rng(seed);

  switch (scenario) {
    case Scenario::Ideal:
    case Scenario::Disperse: {
      if (!(params.radius > 0.0)) throw InvalidInput("hemisphere radius must be > 0");
      if (!(params.rig_frame_rate > 0.0)) throw InvalidInput("rig frame rate must be > 0");
      if (scenario == Scenario::Ideal) {
        sample_hemisphere(vs, n, params, 1.0, 0.0, rng);
      } else {
        if (!(params.cap_angle_deg >= 0.0 && params.cap_angle_deg < 90.0)) {
          throw InvalidInput("polar cap angle must be in [0, 90) degrees");
        }
        // Jitter of up to a quarter of the mean azimuthal spacing per ring.
        const double jitter = 0.25 * 2.0 * std::numbers::pi / static_cast<double>(n);
        sample_hemisphere(vs, n, params, std::cos(params.cap_angle_deg * kDegToRad), jitter, rng);
      }
      break;
    }
    case Scenario::Unbounded: {
      if (params.lines.empty()) throw InvalidInput("unbounded sampling needs a capture line");
      check_line(params.lines.front());
      sample_line(vs, params.lines.front(), n, params.target_center);
      break;
    }
    case Scenario::Cooperative: {
      if (params.lines.empty()) throw InvalidInput("cooperative sampling needs capture lines");
      const std::size_t k = params.lines.size();
      for (std::size_t i = 0; i < k; ++i) {
        check_line(params.lines[i]);
        const std::size_t frames = n / k + (i < n % k ? 1 : 0);
        sample_line(vs, params.lines[i], frames, params.target_center);
      }
      break;
    }
  }
  return vs;
}

double azimuth_deg(Vec3 position, Vec3 center) {
  double az = std::atan2(position.y - center.y, position.x - center.x) / kDegToRad;
  if (az < 0.0) az += 360.0;
  if (az >= 360.0) az -= 360.0;
  return az;
}

std::vector<bool> azimuth_bins(const ViewpointSet& vs, std::size_t bins) {
  if (bins == 0) throw InvalidInput("azimuth bin count must be >= 1");
  std::vector<bool> occupied(bins, false);
  const double width = 360.0 / static_cast<double>(bins);
  for (const CameraPose& pose : vs.poses) {
    const double az = azimuth_deg(pose.translation, vs.target_center);
    // Nudge so exact bin edges such as 90.0 survive the degree conversion.
    auto bin = static_cast<std::size_t>(std::floor(az / width + 1e-9));
    occupied[std::min(bin, bins - 1)] = true;
  }
  return occupied;
}

CoverageSummary coverage_metrics(const ViewpointSet& vs, std::size_t bins) {
  const std::vector<bool> occupied = azimuth_bins(vs, bins);
  const double width = 360.0 / static_cast<double>(bins);
  CoverageSummary out;

  const auto covered = static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), true));
  out.azimuth_fraction = static_cast<double>(covered) / static_cast<double>(bins);

  if (covered == 0) {
    out.max_gap_deg = 360.0;
  } else {
    // Longest circular run of empty bins; start scanning just after an occupied one.
    const auto first = static_cast<std::size_t>(
        std::distance(occupied.begin(), std::find(occupied.begin(), occupied.end(), true)));
    std::size_t run = 0;
    std::size_t longest = 0;
    for (std::size_t k = 1; k <= bins; ++k) {
      if (occupied[(first + k) % bins]) {
        run = 0;
      } else {
        longest = std::max(longest, ++run);
      }
    }
    out.max_gap_deg = static_cast<double>(longest) * width;
  }

  std::set<std::tuple<long long, long long, long long>> seen;
  for (const CameraPose& pose : vs.poses) {
    const Vec3 p = pose.translation;
    seen.emplace(std::llround(p.x * 1e6), std::llround(p.y * 1e6), std::llround(p.z * 1e6));
  }
  out.distinct_views = seen.size();
  return out;
}

}  // namespace twinsim
