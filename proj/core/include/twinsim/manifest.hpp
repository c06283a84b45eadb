#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "twinsim/geometry.hpp"

namespace twinsim {

// Reconstruction-tool manifest: camera_angle_x plus one 4x4 camera matrix per frame.
struct ManifestFrame {
  std::string file_path;
  Matrix4 transform;
};

struct TransformsManifest {
  double camera_angle_x = 0.6911112070083618;
  std::vector<ManifestFrame> frames;
};

TransformsManifest make_manifest(const ViewpointSet& vs, double camera_angle_x);

std::string to_json(const TransformsManifest& manifest);

/// Throws InvalidInput if the document is malformed.
TransformsManifest manifest_from_json(const std::string& text);

/// Writes make_manifest(vs) as JSON. Throws IoError if the path cannot be written.
void write_transforms_manifest(const ViewpointSet& vs, const std::filesystem::path& path,
                               double camera_angle_x = TransformsManifest{}.camera_angle_x);

TransformsManifest read_transforms_manifest(const std::filesystem::path& path);

}  // namespace twinsim
