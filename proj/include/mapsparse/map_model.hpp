#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "mapsparse/binary_matrix.hpp"

namespace mapsparse {

using LandmarkId = std::int64_t;
using KeyframeId = std::int64_t;
using CameraId = std::int64_t;

struct CameraModel {
  CameraId id = 0;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool contains(const Eigen::Vector2d& pixel) const {
    return pixel.x() >= 0.0 && pixel.x() < width && pixel.y() >= 0.0 &&
           pixel.y() < height;
  }
};

// Rigid world -> camera transform: p_cam = R * p_world + t.
struct Pose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d toCamera(const Eigen::Vector3d& p_world) const {
    return rotation * p_world + translation;
  }
  // Camera center in world coordinates.
  Eigen::Vector3d opticalCenter() const {
    return -(rotation.conjugate() * translation);
  }
  static Pose lookAt(const Eigen::Vector3d& center,
                     const Eigen::Vector3d& target,
                     const Eigen::Vector3d& up = Eigen::Vector3d::UnitZ());
};

struct Landmark {
  LandmarkId id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::int64_t match_count = 0;
};

struct Keyframe {
  KeyframeId id = 0;
  CameraId camera_id = 0;
  Pose pose;
};

struct Observation {
  KeyframeId keyframe_id = 0;
  LandmarkId landmark_id = 0;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
};

// Observation resolved to dense indices.
struct ObservationRef {
  std::uint32_t keyframe = 0;
  std::uint32_t landmark = 0;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
};

// Immutable, validated map. Landmarks, keyframes and cameras are stored sorted
// by id; positions in those arrays are the dense indices used by every matrix
// and vector in the library.
class Map {
 public:
  using Metadata = std::map<std::string, std::string>;

  // Validates every invariant and throws IntegrityError on failure.
  static Map build(std::vector<CameraModel> cameras,
                   std::vector<Keyframe> keyframes,
                   std::vector<Landmark> landmarks,
                   std::vector<Observation> observations,
                   Metadata metadata = {});

  std::size_t numLandmarks() const { return landmarks_.size(); }
  std::size_t numKeyframes() const { return keyframes_.size(); }
  std::size_t numObservations() const { return observations_.size(); }

  std::span<const CameraModel> cameras() const { return cameras_; }
  std::span<const Keyframe> keyframes() const { return keyframes_; }
  std::span<const Landmark> landmarks() const { return landmarks_; }
  // Sorted by (keyframe index, landmark index).
  std::span<const ObservationRef> observations() const { return observations_; }
  const Metadata& metadata() const { return metadata_; }

  const CameraModel& cameraOf(std::size_t keyframe_index) const {
    return cameras_[keyframe_camera_[keyframe_index]];
  }
  const CameraModel* cameraById(CameraId id) const;

  std::optional<std::size_t> landmarkIndex(LandmarkId id) const;
  std::optional<std::size_t> keyframeIndex(KeyframeId id) const;

  // Observations of one keyframe (contiguous slice).
  std::span<const ObservationRef> observationsOfKeyframe(std::size_t kf) const;
  // Indices into observations() for one landmark, ascending keyframe order.
  std::span<const std::uint32_t> observationsOfLandmark(std::size_t lm) const;

  Map withMetadata(Metadata metadata) const;

  // Keeps the selected landmarks and their observations; keyframes, cameras
  // and ids are untouched.
  Map subset(std::span<const std::uint8_t> selected, Metadata metadata) const;

 private:
  Map() = default;

  std::vector<CameraModel> cameras_;
  std::vector<Keyframe> keyframes_;
  std::vector<Landmark> landmarks_;
  std::vector<ObservationRef> observations_;
  std::vector<std::uint32_t> keyframe_camera_;
  std::vector<std::size_t> kf_obs_begin_;
  std::vector<std::size_t> lm_obs_begin_;
  std::vector<std::uint32_t> lm_obs_index_;
  Metadata metadata_;
};

// Pinhole projection of a world point; empty when the point is behind the
// camera or falls outside [0,width) x [0,height).
std::optional<Eigen::Vector2d> project(const CameraModel& camera,
                                       const Pose& pose,
                                       const Eigen::Vector3d& point);

// M x N keyframe/landmark association matrix A.
BinaryMatrix associationMatrix(const Map& map);

Map loadMap(const std::filesystem::path& path);
Map parseMap(const std::string& json_text);
void saveMap(const Map& map, const std::filesystem::path& path);
std::string serializeMap(const Map& map);

// Structural equality: same ids, values and associations.
bool sameStructure(const Map& a, const Map& b);

}  // namespace mapsparse
