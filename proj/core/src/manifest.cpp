#include "twinsim/manifest.hpp"

#include <fmt/format.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "twinsim/errors.hpp"

namespace twinsim {

using nlohmann::json;

TransformsManifest make_manifest(const ViewpointSet& vs, double camera_angle_x) {
  TransformsManifest out;
  out.camera_angle_x = camera_angle_x;
  out.frames.reserve(vs.poses.size());
  for (std::size_t i = 0; i < vs.poses.size(); ++i) {
    out.frames.push_back({fmt::format("./images/frame_{:04d}", i),
                          compose_camera_matrix(vs.poses[i])});
  }
  return out;
}

std::string to_json(const TransformsManifest& manifest) {
  // nlohmann emits the shortest decimal that round-trips each double exactly.
  json doc;
  doc["camera_angle_x"] = manifest.camera_angle_x;
  doc["frames"] = json::array();
  for (const ManifestFrame& frame : manifest.frames) {
    json rows = json::array();
    for (std::size_t r = 0; r < 4; ++r) {
      rows.push_back({frame.transform(r, 0), frame.transform(r, 1), frame.transform(r, 2),
                      frame.transform(r, 3)});
    }
    doc["frames"].push_back({{"file_path", frame.file_path}, {"transform_matrix", rows}});
  }
  return doc.dump(2) + "\n";
}

TransformsManifest manifest_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    TransformsManifest out;
    out.camera_angle_x = doc.at("camera_angle_x").get<double>();
    for (const json& frame : doc.at("frames")) {
      ManifestFrame f;
      f.file_path = frame.at("file_path").get<std::string>();
      const json& rows = frame.at("transform_matrix");
      if (rows.size() != 4) throw InvalidInput("transform_matrix must have 4 rows");
      for (std::size_t r = 0; r < 4; ++r) {
        if (rows[r].size() != 4) throw InvalidInput("transform_matrix rows must have 4 entries");
        for (std::size_t c = 0; c < 4; ++c) f.transform(r, c) = rows[r][c].get<double>();
      }
      out.frames.push_back(std::move(f));
    }
    return out;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed transforms manifest: ") + e.what());
  }
}

void write_transforms_manifest(const ViewpointSet& vs, const std::filesystem::path& path,
                               double camera_angle_x) {
  const std::string text = to_json(make_manifest(vs, camera_angle_x));
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

TransformsManifest read_transforms_manifest(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return manifest_from_json(ss.str());
}

}  // namespace twinsim
