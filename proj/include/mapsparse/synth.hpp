#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mapsparse/eval.hpp"
#include "mapsparse/map_model.hpp"

namespace mapsparse {

enum class TrajectoryKind { kLoop, kCorridor, kRandomWalk };
enum class PlacementKind { kUniformBox, kClustered };

// Synthetic scene: a box-shaped room whose six faces carry the landmarks
// (each with an inward surface normal) and a camera trajectory inside it.
struct SceneSpec {
  std::size_t n_landmarks = 5000;
  std::size_t n_keyframes = 100;
  TrajectoryKind trajectory = TrajectoryKind::kLoop;
  PlacementKind placement = PlacementKind::kUniformBox;
  std::size_t clusters = 30;      // clustered placement: k
  double cluster_sigma = 0.3;     // clustered placement: sigma, meters
  CameraModel camera{0, 500.0, 500.0, 320.0, 240.0, 640, 480};
  double noise_px = 0.5;
  std::uint64_t seed = 1;

  Eigen::Vector3d room{16.0, 12.0, 3.0};  // extent, meters; room spans [0, room]
  double camera_height = 1.5;
  double depth_min = 0.5;
  double depth_max = 20.0;
  // Landmarks are only observed within this angle of their surface normal.
  double max_view_angle_deg = 70.0;
  std::size_t min_observations = 20;

  // Throws ConfigError on non-positive counts, negative noise and the like.
  void validate() const;
};

std::string_view toString(TrajectoryKind t);
std::string_view toString(PlacementKind p);

// JSON with the field names above; `placement` is "uniform-box" or
// {"kind":"clustered","k":K,"sigma":S}. Missing fields keep defaults.
SceneSpec parseSceneSpec(const std::string& json_text);
SceneSpec loadSceneSpec(const std::filesystem::path& path);
std::string serializeSceneSpec(const SceneSpec& spec);

// Deterministic per spec (including its seed). Throws ConfigError when some
// keyframe cannot be given min_observations landmarks.
Map generateMap(const SceneSpec& spec);

// Query views of one stratum, deterministic per seed.
std::vector<QueryView> generateQueries(const Map& map, QueryStratum stratum,
                                       std::size_t count, std::uint64_t seed);

}  // namespace mapsparse
