#include "mapsparse/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "mapsparse/error.hpp"

namespace mapsparse {
namespace {

template <typename Ids>
std::string joinIds(const Ids& ids) {
  std::ostringstream os;
  bool first = true;
  for (auto id : ids) {
    if (!first) os << ", ";
    os << id;
    first = false;
  }
  return os.str();
}

bool finite3(const Eigen::Vector3d& v) { return v.allFinite(); }

template <typename T>
std::optional<std::size_t> findById(const std::vector<T>& sorted,
                                    std::int64_t id) {
  auto it = std::lower_bound(
      sorted.begin(), sorted.end(), id,
      [](const T& item, std::int64_t key) { return item.id < key; });
  if (it == sorted.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - sorted.begin());
}

template <typename T>
void sortAndCheckUnique(std::vector<T>& items, const char* what) {
  std::sort(items.begin(), items.end(),
            [](const T& a, const T& b) { return a.id < b.id; });
  std::set<std::int64_t> dups;
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i].id == items[i - 1].id) dups.insert(items[i].id);
  }
  if (!dups.empty()) {
    throw IntegrityError(std::string("duplicate ") + what +
                         " ids: " + joinIds(dups));
  }
}

}  // namespace

Pose Pose::lookAt(const Eigen::Vector3d& center, const Eigen::Vector3d& target,
                  const Eigen::Vector3d& up) {
  Eigen::Vector3d z = (target - center).normalized();
  Eigen::Vector3d x = z.cross(up);
  if (x.norm() < 1e-9) {
    x = z.cross(Eigen::Vector3d::UnitX());
    if (x.norm() < 1e-9) x = z.cross(Eigen::Vector3d::UnitY());
  }
  x.normalize();
  Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  Pose pose;
  pose.rotation = Eigen::Quaterniond(r).normalized();
  pose.translation = -(pose.rotation * center);
  return pose;
}

Map Map::build(std::vector<CameraModel> cameras,
               std::vector<Keyframe> keyframes,
               std::vector<Landmark> landmarks,
               std::vector<Observation> observations, Metadata metadata) {
  Map map;
  sortAndCheckUnique(cameras, "camera");
  sortAndCheckUnique(keyframes, "keyframe");
  sortAndCheckUnique(landmarks, "landmark");

  for (const auto& c : cameras) {
    const bool ok = std::isfinite(c.fx) && std::isfinite(c.fy) &&
                    std::isfinite(c.cx) && std::isfinite(c.cy) && c.fx > 0 &&
                    c.fy > 0 && c.width > 0 && c.height > 0 && c.cx >= 0 &&
                    c.cx < c.width && c.cy >= 0 && c.cy < c.height;
    if (!ok) {
      throw IntegrityError("camera " + std::to_string(c.id) +
                           " has invalid intrinsics");
    }
  }

  std::set<std::int64_t> dangling_cameras;
  for (auto& kf : keyframes) {
    if (!findById(cameras, kf.camera_id)) dangling_cameras.insert(kf.camera_id);
    const double norm = kf.pose.rotation.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
      throw IntegrityError("keyframe " + std::to_string(kf.id) +
                           " rotation is not a unit quaternion (norm " +
                           std::to_string(norm) + ")");
    }
    // Import precision is tolerated; stored poses are always unit to 1e-12.
    if (std::abs(norm - 1.0) > 1e-12) kf.pose.rotation.normalize();
    if (!finite3(kf.pose.translation)) {
      throw IntegrityError("keyframe " + std::to_string(kf.id) +
                           " translation is not finite");
    }
  }
  if (!dangling_cameras.empty()) {
    throw IntegrityError("keyframes reference missing camera ids: " +
                         joinIds(dangling_cameras));
  }

  for (const auto& lm : landmarks) {
    if (!finite3(lm.position)) {
      throw IntegrityError("landmark " + std::to_string(lm.id) +
                           " position is not finite");
    }
    if (lm.match_count < 0) {
      throw IntegrityError("landmark " + std::to_string(lm.id) +
                           " has negative match_count");
    }
  }

  std::set<std::int64_t> dangling_lm;
  std::set<std::int64_t> dangling_kf;
  std::vector<ObservationRef> refs;
  refs.reserve(observations.size());
  for (const auto& ob : observations) {
    auto kf = findById(keyframes, ob.keyframe_id);
    auto lm = findById(landmarks, ob.landmark_id);
    if (!kf) dangling_kf.insert(ob.keyframe_id);
    if (!lm) dangling_lm.insert(ob.landmark_id);
    if (!kf || !lm) continue;
    refs.push_back({static_cast<std::uint32_t>(*kf),
                    static_cast<std::uint32_t>(*lm), ob.pixel});
  }
  if (!dangling_lm.empty() || !dangling_kf.empty()) {
    std::string msg = "observations reference";
    if (!dangling_lm.empty()) msg += " missing landmark ids: " + joinIds(dangling_lm);
    if (!dangling_kf.empty()) {
      if (!dangling_lm.empty()) msg += ";";
      msg += " missing keyframe ids: " + joinIds(dangling_kf);
    }
    throw IntegrityError(msg);
  }

  std::sort(refs.begin(), refs.end(),
            [](const ObservationRef& a, const ObservationRef& b) {
              return a.keyframe != b.keyframe ? a.keyframe < b.keyframe
                                              : a.landmark < b.landmark;
            });
  for (std::size_t i = 1; i < refs.size(); ++i) {
    if (refs[i].keyframe == refs[i - 1].keyframe &&
        refs[i].landmark == refs[i - 1].landmark) {
      throw IntegrityError(
          "duplicate observation of landmark " +
          std::to_string(landmarks[refs[i].landmark].id) + " in keyframe " +
          std::to_string(keyframes[refs[i].keyframe].id));
    }
  }

  map.keyframe_camera_.resize(keyframes.size());
  for (std::size_t k = 0; k < keyframes.size(); ++k) {
    map.keyframe_camera_[k] =
        static_cast<std::uint32_t>(*findById(cameras, keyframes[k].camera_id));
  }

  std::vector<std::uint32_t> lm_obs_count(landmarks.size(), 0);
  for (const auto& r : refs) {
    const CameraModel& cam = cameras[map.keyframe_camera_[r.keyframe]];
    if (!r.pixel.allFinite() || !cam.contains(r.pixel)) {
      throw IntegrityError("observation of landmark " +
                           std::to_string(landmarks[r.landmark].id) +
                           " in keyframe " +
                           std::to_string(keyframes[r.keyframe].id) +
                           " lies outside the image");
    }
    ++lm_obs_count[r.landmark];
  }
  for (std::size_t j = 0; j < landmarks.size(); ++j) {
    if (lm_obs_count[j] > 0 && landmarks[j].match_count < 1) {
      throw IntegrityError("landmark " + std::to_string(landmarks[j].id) +
                           " is observed but has match_count < 1");
    }
  }

  map.kf_obs_begin_.assign(keyframes.size() + 1, 0);
  for (const auto& r : refs) ++map.kf_obs_begin_[r.keyframe + 1];
  std::partial_sum(map.kf_obs_begin_.begin(), map.kf_obs_begin_.end(),
                   map.kf_obs_begin_.begin());

  map.lm_obs_begin_.assign(landmarks.size() + 1, 0);
  for (std::size_t j = 0; j < landmarks.size(); ++j) {
    map.lm_obs_begin_[j + 1] = map.lm_obs_begin_[j] + lm_obs_count[j];
  }
  map.lm_obs_index_.resize(refs.size());
  std::vector<std::size_t> cursor(map.lm_obs_begin_.begin(),
                                  map.lm_obs_begin_.end() - 1);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    map.lm_obs_index_[cursor[refs[i].landmark]++] =
        static_cast<std::uint32_t>(i);
  }

  map.cameras_ = std::move(cameras);
  map.keyframes_ = std::move(keyframes);
  map.landmarks_ = std::move(landmarks);
  map.observations_ = std::move(refs);
  map.metadata_ = std::move(metadata);
  return map;
}

const CameraModel* Map::cameraById(CameraId id) const {
  auto idx = findById(cameras_, id);
  return idx ? &cameras_[*idx] : nullptr;
}

std::optional<std::size_t> Map::landmarkIndex(LandmarkId id) const {
  return findById(landmarks_, id);
}

std::optional<std::size_t> Map::keyframeIndex(KeyframeId id) const {
  return findById(keyframes_, id);
}

std::span<const ObservationRef> Map::observationsOfKeyframe(
    std::size_t kf) const {
  return {observations_.data() + kf_obs_begin_[kf],
          kf_obs_begin_[kf + 1] - kf_obs_begin_[kf]};
}

std::span<const std::uint32_t> Map::observationsOfLandmark(
    std::size_t lm) const {
  return {lm_obs_index_.data() + lm_obs_begin_[lm],
          lm_obs_begin_[lm + 1] - lm_obs_begin_[lm]};
}

Map Map::withMetadata(Metadata metadata) const {
  Map copy = *this;
  copy.metadata_ = std::move(metadata);
  return copy;
}

Map Map::subset(std::span<const std::uint8_t> selected,
                Metadata metadata) const {
  if (selected.size() != landmarks_.size()) {
    throw ContractViolation("selection length does not match landmark count");
  }
  std::vector<Landmark> lms;
  for (std::size_t j = 0; j < landmarks_.size(); ++j) {
    if (selected[j]) lms.push_back(landmarks_[j]);
  }
  std::vector<Observation> obs;
  for (const auto& r : observations_) {
    if (!selected[r.landmark]) continue;
    obs.push_back({keyframes_[r.keyframe].id, landmarks_[r.landmark].id,
                   r.pixel});
  }
  return build(cameras_, keyframes_, std::move(lms), std::move(obs),
               std::move(metadata));
}

std::optional<Eigen::Vector2d> project(const CameraModel& camera,
                                       const Pose& pose,
                                       const Eigen::Vector3d& point) {
  const Eigen::Vector3d pc = pose.toCamera(point);
  if (!(pc.z() > 0.0)) return std::nullopt;
  Eigen::Vector2d uv(camera.fx * pc.x() / pc.z() + camera.cx,
                     camera.fy * pc.y() / pc.z() + camera.cy);
  if (!camera.contains(uv)) return std::nullopt;
  return uv;
}

BinaryMatrix associationMatrix(const Map& map) {
  BinaryMatrix a(0, map.numLandmarks());
  std::vector<std::uint32_t> cols;
  for (std::size_t k = 0; k < map.numKeyframes(); ++k) {
    cols.clear();
    for (const auto& ob : map.observationsOfKeyframe(k)) {
      cols.push_back(ob.landmark);
    }
    a.appendRow(cols);
  }
  return a;
}

bool sameStructure(const Map& a, const Map& b) {
  if (a.numLandmarks() != b.numLandmarks() ||
      a.numKeyframes() != b.numKeyframes() ||
      a.numObservations() != b.numObservations() ||
      a.cameras().size() != b.cameras().size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.cameras().size(); ++i) {
    const auto& x = a.cameras()[i];
    const auto& y = b.cameras()[i];
    if (x.id != y.id || x.fx != y.fx || x.fy != y.fy || x.cx != y.cx ||
        x.cy != y.cy || x.width != y.width || x.height != y.height) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.numKeyframes(); ++i) {
    const auto& x = a.keyframes()[i];
    const auto& y = b.keyframes()[i];
    if (x.id != y.id || x.camera_id != y.camera_id ||
        x.pose.rotation.coeffs() != y.pose.rotation.coeffs() ||
        x.pose.translation != y.pose.translation) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.numLandmarks(); ++i) {
    const auto& x = a.landmarks()[i];
    const auto& y = b.landmarks()[i];
    if (x.id != y.id || x.position != y.position ||
        x.match_count != y.match_count) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.numObservations(); ++i) {
    const auto& x = a.observations()[i];
    const auto& y = b.observations()[i];
    if (x.keyframe != y.keyframe || x.landmark != y.landmark ||
        x.pixel != y.pixel) {
      return false;
    }
  }
  return a.metadata() == b.metadata();
}

}  // namespace mapsparse
