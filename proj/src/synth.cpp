#include "mapsparse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "json_fields.hpp"
#include "mapsparse/error.hpp"

namespace mapsparse {
namespace {

using Rng = std::mt19937_64;
using Eigen::Vector3d;

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kRelocationRounds = 12;
constexpr double kWallClearance = 0.3;  // queries stay this far inside the room

struct SurfacePoint {
  Vector3d position;
  Vector3d normal;  // pointing into the room
};

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vector3d randomUnit(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector3d v;
  do {
    v = Vector3d(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-9);
  return v.normalized();
}

// Faces of the room box [0, room]: index f = 2 * axis + side.
struct Room {
  Vector3d extent;

  double faceArea(int f) const {
    const int axis = f / 2;
    return extent[(axis + 1) % 3] * extent[(axis + 2) % 3];
  }
  Vector3d normal(int f) const {
    Vector3d n = Vector3d::Zero();
    n[f / 2] = f % 2 == 0 ? 1.0 : -1.0;
    return n;
  }
  // Point on face f from in-face coordinates (a, b) along the other two axes.
  Vector3d onFace(int f, double a, double b) const {
    const int axis = f / 2;
    Vector3d p;
    p[axis] = f % 2 == 0 ? 0.0 : extent[axis];
    p[(axis + 1) % 3] = std::clamp(a, 0.0, extent[(axis + 1) % 3]);
    p[(axis + 2) % 3] = std::clamp(b, 0.0, extent[(axis + 2) % 3]);
    return p;
  }
  int randomFace(Rng& rng) const {
    std::discrete_distribution<int> pick(
        {faceArea(0), faceArea(1), faceArea(2), faceArea(3), faceArea(4), faceArea(5)});
    return pick(rng);
  }
  SurfacePoint uniformPoint(Rng& rng) const {
    const int f = randomFace(rng);
    const int axis = f / 2;
    const double a = uniform(rng, 0.0, extent[(axis + 1) % 3]);
    const double b = uniform(rng, 0.0, extent[(axis + 2) % 3]);
    return {onFace(f, a, b), normal(f)};
  }
  // First wall hit by a ray starting inside the room.
  std::optional<SurfacePoint> cast(const Vector3d& origin, const Vector3d& dir) const {
    double best = std::numeric_limits<double>::infinity();
    int face = -1;
    for (int axis = 0; axis < 3; ++axis) {
      if (std::abs(dir[axis]) < 1e-12) continue;
      const double target = dir[axis] > 0 ? extent[axis] : 0.0;
      const double t = (target - origin[axis]) / dir[axis];
      if (t > 0 && t < best) {
        best = t;
        face = 2 * axis + (dir[axis] > 0 ? 1 : 0);
      }
    }
    if (face < 0) return std::nullopt;
    Vector3d p = origin + best * dir;
    p[face / 2] = face % 2 == 0 ? 0.0 : extent[face / 2];
    return SurfacePoint{p, normal(face)};
  }
};

std::vector<SurfacePoint> placeLandmarks(const SceneSpec& spec, const Room& room,
                                         Rng& rng) {
  std::vector<SurfacePoint> out;
  out.reserve(spec.n_landmarks);
  if (spec.placement == PlacementKind::kUniformBox) {
    for (std::size_t i = 0; i < spec.n_landmarks; ++i) out.push_back(room.uniformPoint(rng));
    return out;
  }
  struct Cluster {
    int face;
    double a, b;
  };
  std::vector<Cluster> centers;
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    const int f = room.randomFace(rng);
    const int axis = f / 2;
    centers.push_back({f, uniform(rng, 0.0, room.extent[(axis + 1) % 3]),
                       uniform(rng, 0.0, room.extent[(axis + 2) % 3])});
  }
  std::normal_distribution<double> g(0.0, spec.cluster_sigma);
  std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
  for (std::size_t i = 0; i < spec.n_landmarks; ++i) {
    const Cluster& c = centers[pick(rng)];
    out.push_back({room.onFace(c.face, c.a + g(rng), c.b + g(rng)), room.normal(c.face)});
  }
  return out;
}

struct Waypoint {
  Vector3d center;
  double yaw;  // heading in the horizontal plane
};

Pose poseFrom(const Waypoint& w) {
  const Vector3d fwd(std::cos(w.yaw), std::sin(w.yaw), 0.0);
  return Pose::lookAt(w.center, w.center + fwd);
}

std::vector<Waypoint> walk(const SceneSpec& spec, Rng& rng) {
  const Vector3d& e = spec.room;
  const Vector3d mid(e.x() / 2, e.y() / 2, spec.camera_height);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::vector<Waypoint> out;
  const std::size_t m = spec.n_keyframes;
  switch (spec.trajectory) {
    case TrajectoryKind::kLoop: {
      const double a = 0.3 * e.x(), b = 0.3 * e.y();
      for (std::size_t k = 0; k < m; ++k) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(m);
        const Vector3d c = mid + Vector3d(a * std::cos(phi), b * std::sin(phi),
                                          0.05 * jitter(rng));
        const double yaw = std::atan2(b * std::cos(phi), -a * std::sin(phi)) +
                           5.0 * kDeg * jitter(rng);
        out.push_back({c, yaw});
      }
      break;
    }
    case TrajectoryKind::kCorridor: {
      for (std::size_t k = 0; k < m; ++k) {
        const double s = m > 1 ? static_cast<double>(k) / static_cast<double>(m - 1) : 0.5;
        const Vector3d c(e.x() * (0.15 + 0.7 * s), mid.y() + 0.1 * jitter(rng),
                         spec.camera_height + 0.05 * jitter(rng));
        const double side = k % 2 == 0 ? 1.0 : -1.0;
        out.push_back({c, side * 40.0 * kDeg + 5.0 * kDeg * jitter(rng)});
      }
      break;
    }
    case TrajectoryKind::kRandomWalk: {
      const double margin = std::min({1.5, 0.25 * e.x(), 0.25 * e.y()});
      Vector3d c = mid;
      double yaw = uniform(rng, -std::numbers::pi, std::numbers::pi);
      for (std::size_t k = 0; k < m; ++k) {
        out.push_back({c, yaw});
        yaw += 15.0 * kDeg * jitter(rng);
        Vector3d next = c + 0.3 * Vector3d(std::cos(yaw), std::sin(yaw), 0.0);
        if (next.x() < margin || next.x() > e.x() - margin || next.y() < margin ||
            next.y() > e.y() - margin) {
          yaw += std::numbers::pi;
          next = c + 0.3 * Vector3d(std::cos(yaw), std::sin(yaw), 0.0);
        }
        c = next;
      }
      break;
    }
  }
  return out;
}

bool observable(const SceneSpec& spec, const Pose& pose, const SurfacePoint& lm,
                Eigen::Vector2d* pixel) {
  const Vector3d pc = pose.toCamera(lm.position);
  if (pc.z() < spec.depth_min || pc.z() > spec.depth_max) return false;
  const auto px = project(spec.camera, pose, lm.position);
  if (!px) return false;
  const Vector3d to_cam = pose.opticalCenter() - lm.position;
  const double cos_view = lm.normal.dot(to_cam) / to_cam.norm();
  if (cos_view <= std::cos(spec.max_view_angle_deg * kDeg)) return false;
  if (pixel != nullptr) *pixel = *px;
  return true;
}

}  // namespace

std::string_view toString(TrajectoryKind t) {
  switch (t) {
    case TrajectoryKind::kLoop: return "loop";
    case TrajectoryKind::kCorridor: return "corridor";
    case TrajectoryKind::kRandomWalk: return "random-walk";
  }
  return "?";
}

std::string_view toString(PlacementKind p) {
  switch (p) {
    case PlacementKind::kUniformBox: return "uniform-box";
    case PlacementKind::kClustered: return "clustered";
  }
  return "?";
}

void SceneSpec::validate() const {
  if (n_landmarks == 0) throw ConfigError("n_landmarks must be positive");
  if (n_keyframes == 0) throw ConfigError("n_keyframes must be positive");
  if (placement == PlacementKind::kClustered && clusters == 0) {
    throw ConfigError("clustered placement needs k >= 1");
  }
  if (!(cluster_sigma >= 0.0)) throw ConfigError("cluster sigma must be >= 0");
  if (!(noise_px >= 0.0)) throw ConfigError("noise_px must be >= 0");
  if (!(camera.fx > 0 && camera.fy > 0 && camera.width > 0 && camera.height > 0)) {
    throw ConfigError("camera intrinsics must be positive");
  }
  if (!(room.minCoeff() > 0.0)) throw ConfigError("room extent must be positive");
  if (!(camera_height > 0.0 && camera_height < room.z())) {
    throw ConfigError("camera_height must lie inside the room");
  }
  if (!(depth_min >= 0.0 && depth_max > depth_min)) {
    throw ConfigError("depth window must satisfy 0 <= min < max");
  }
  if (!(max_view_angle_deg > 0.0 && max_view_angle_deg <= 90.0)) {
    throw ConfigError("max_view_angle_deg must be in (0, 90]");
  }
}

Map generateMap(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const Room room{spec.room};

  std::vector<SurfacePoint> points = placeLandmarks(spec, room, rng);
  const std::vector<Waypoint> path = walk(spec, rng);
  std::vector<Pose> poses;
  for (const auto& w : path) poses.push_back(poseFrom(w));

  // Visibility lists, repaired by moving the least-seen landmarks into the
  // view of keyframes that see too few.
  const std::size_t n = points.size(), m = poses.size();
  std::vector<std::vector<std::uint32_t>> seen_by(m);
  auto rescan = [&] {
    for (auto& s : seen_by) s.clear();
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        if (observable(spec, poses[k], points[j], nullptr)) {
          seen_by[k].push_back(static_cast<std::uint32_t>(j));
        }
      }
    }
  };
  rescan();
  for (int round = 0;; ++round) {
    std::vector<std::size_t> views(n, 0);
    for (const auto& s : seen_by) for (auto j : s) ++views[j];
    std::vector<std::size_t> deficient;
    for (std::size_t k = 0; k < m; ++k) {
      if (seen_by[k].size() < spec.min_observations) deficient.push_back(k);
    }
    if (deficient.empty()) break;
    if (round >= kRelocationRounds) {
      throw ConfigError("scene spec is infeasible: keyframe " +
                        std::to_string(deficient.front()) + " observes only " +
                        std::to_string(seen_by[deficient.front()].size()) +
                        " landmarks after " + std::to_string(kRelocationRounds) +
                        " relocation rounds (need " +
                        std::to_string(spec.min_observations) + ")");
    }
    // Donors come fewest views first. A donor is safe when every keyframe
    // seeing it keeps at least min_observations without it; unsafe donors
    // are only used once safe ones run out.
    std::vector<std::vector<std::uint32_t>> seers(n);
    std::vector<std::size_t> count(m);
    for (std::size_t k = 0; k < m; ++k) {
      count[k] = seen_by[k].size();
      for (auto j : seen_by[k]) seers[j].push_back(static_cast<std::uint32_t>(k));
    }
    std::vector<std::uint32_t> donors(n);
    std::iota(donors.begin(), donors.end(), 0u);
    std::stable_sort(donors.begin(), donors.end(),
                     [&](auto a, auto b) { return views[a] < views[b]; });
    std::vector<std::uint8_t> moved(n, 0);
    auto safe = [&](std::uint32_t j) {
      return std::all_of(seers[j].begin(), seers[j].end(),
                         [&](auto k) { return count[k] > spec.min_observations; });
    };
    auto takeDonor = [&](std::size_t for_kf) -> std::optional<std::uint32_t> {
      std::optional<std::uint32_t> fallback;
      for (auto j : donors) {
        if (moved[j]) continue;
        if (std::find(seers[j].begin(), seers[j].end(), for_kf) != seers[j].end()) continue;
        if (safe(j)) return j;
        if (!fallback) fallback = j;
      }
      return fallback;
    };

    for (std::size_t k : deficient) {
      const Pose& pose = poses[k];
      const Vector3d center = pose.opticalCenter();
      auto castPixel = [&](double u, double v) {
        const Vector3d ray_cam((u - spec.camera.cx) / spec.camera.fx,
                               (v - spec.camera.cy) / spec.camera.fy, 1.0);
        return room.cast(center, (pose.rotation.conjugate() * ray_cam).normalized());
      };
      // Clustered scenes regenerate a tight cluster around one anchor so the
      // placement keeps its character; uniform scenes scatter over the view.
      std::optional<SurfacePoint> anchor;
      if (spec.placement == PlacementKind::kClustered) {
        for (int attempt = 0; attempt < 200 && !anchor; ++attempt) {
          auto hit = castPixel(uniform(rng, 0.2, 0.8) * spec.camera.width,
                               uniform(rng, 0.2, 0.8) * spec.camera.height);
          if (hit && observable(spec, pose, *hit, nullptr)) anchor = hit;
        }
      }
      std::normal_distribution<double> spread(0.0, std::max(spec.cluster_sigma, 1e-3));
      std::size_t need = count[k] < spec.min_observations ? spec.min_observations - count[k] : 0;
      for (int attempt = 0; need > 0 && attempt < 50 * static_cast<int>(need + 1); ++attempt) {
        std::optional<SurfacePoint> hit;
        if (anchor) {
          const Vector3d& nrm = anchor->normal;
          int axis = 0;
          nrm.cwiseAbs().maxCoeff(&axis);
          const int face = 2 * axis + (nrm[axis] > 0 ? 0 : 1);
          const Vector3d& p = anchor->position;
          hit = SurfacePoint{room.onFace(face, p[(axis + 1) % 3] + spread(rng),
                                         p[(axis + 2) % 3] + spread(rng)),
                             nrm};
        } else {
          hit = castPixel(uniform(rng, 0.0, spec.camera.width),
                          uniform(rng, 0.0, spec.camera.height));
        }
        if (!hit || !observable(spec, pose, *hit, nullptr)) continue;
        const auto j = takeDonor(k);
        if (!j) break;
        for (auto other : seers[*j]) --count[other];
        seers[*j].clear();
        points[*j] = *hit;
        moved[*j] = 1;
        ++count[k];
        --need;
      }
    }
    rescan();
  }

  // Assemble the map.
  std::vector<CameraModel> cameras{spec.camera};
  std::vector<Keyframe> keyframes;
  for (std::size_t k = 0; k < m; ++k) {
    keyframes.push_back({static_cast<KeyframeId>(k), spec.camera.id, poses[k]});
  }
  std::vector<Landmark> landmarks(n);
  for (std::size_t j = 0; j < n; ++j) {
    landmarks[j] = {static_cast<LandmarkId>(j), points[j].position, 0};
  }
  std::normal_distribution<double> pixel_noise(0.0, 1.0);
  std::vector<Observation> observations;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::uint32_t j : seen_by[k]) {
      Eigen::Vector2d px;
      observable(spec, poses[k], points[j], &px);
      if (spec.noise_px > 0.0) {
        px += spec.noise_px * Eigen::Vector2d(pixel_noise(rng), pixel_noise(rng));
        px.x() = std::clamp(px.x(), 0.0, std::nextafter(spec.camera.width, 0.0));
        px.y() = std::clamp(px.y(), 0.0, std::nextafter(spec.camera.height, 0.0));
      }
      observations.push_back({static_cast<KeyframeId>(k), static_cast<LandmarkId>(j), px});
      ++landmarks[j].match_count;
    }
  }
  // Match counts: observations plus a seeded surplus from non-keyframe hits.
  for (auto& lm : landmarks) {
    if (lm.match_count == 0) continue;
    std::uniform_int_distribution<std::int64_t> extra(0, std::max<std::int64_t>(1, lm.match_count / 2));
    lm.match_count += extra(rng);
  }

  Map::Metadata meta{{"generator", "synth"},
                     {"seed", std::to_string(spec.seed)},
                     {"scene", serializeSceneSpec(spec)}};
  return Map::build(std::move(cameras), std::move(keyframes), std::move(landmarks),
                    std::move(observations), std::move(meta));
}

std::vector<QueryView> generateQueries(const Map& map, QueryStratum stratum,
                                       std::size_t count, std::uint64_t seed) {
  std::vector<QueryView> out;
  if (count == 0) return out;
  if (map.numKeyframes() == 0) throw ContractViolation("map has no keyframes");
  Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(stratum) + 1)));

  // Interior box: the landmark hull (the room) shrunk by a wall clearance.
  Vector3d lo = Vector3d::Constant(std::numeric_limits<double>::infinity());
  Vector3d hi = -lo;
  Vector3d centroid = Vector3d::Zero();
  for (const auto& lm : map.landmarks()) {
    lo = lo.cwiseMin(lm.position);
    hi = hi.cwiseMax(lm.position);
    centroid += lm.position;
  }
  Vector3d kf_lo = Vector3d::Constant(std::numeric_limits<double>::infinity());
  Vector3d kf_hi = -kf_lo;
  for (const auto& kf : map.keyframes()) {
    const Vector3d c = kf.pose.opticalCenter();
    kf_lo = kf_lo.cwiseMin(c);
    kf_hi = kf_hi.cwiseMax(c);
  }
  if (map.numLandmarks() == 0) {
    lo = kf_lo.array() - 2.0;
    hi = kf_hi.array() + 2.0;
    centroid = 0.5 * (kf_lo + kf_hi);
  } else {
    centroid /= static_cast<double>(map.numLandmarks());
    lo = lo.array() + kWallClearance;
    hi = hi.array() - kWallClearance;
  }
  auto inside = [&](const Vector3d& c) {
    return (c.array() >= lo.array()).all() && (c.array() <= hi.array()).all();
  };

  std::uniform_int_distribution<std::size_t> pick_kf(0, map.numKeyframes() - 1);
  const CameraModel& default_cam = map.cameraOf(0);
  for (std::size_t i = 0; i < count; ++i) {
    QueryView q;
    q.label = stratum;
    switch (stratum) {
      case QueryStratum::kOnTrajectory: {
        const std::size_t k = pick_kf(rng);
        const Pose& base = map.keyframes()[k].pose;
        q.camera = map.cameraOf(k);
        const Vector3d dt = randomUnit(rng) * 0.1 * std::cbrt(uniform(rng, 0.0, 1.0));
        const Eigen::AngleAxisd dr(uniform(rng, 0.0, 5.0 * kDeg), randomUnit(rng));
        q.pose.rotation = (Eigen::Quaterniond(dr) * base.rotation).normalized();
        q.pose.translation = -(q.pose.rotation * (base.opticalCenter() + dt));
        break;
      }
      case QueryStratum::kOffset: {
        const std::size_t k = pick_kf(rng);
        const Pose& base = map.keyframes()[k].pose;
        q.camera = map.cameraOf(k);
        const Vector3d fwd = base.rotation.conjugate() * Vector3d::UnitZ();
        Vector3d lateral = Vector3d::UnitZ().cross(fwd);
        if (lateral.norm() < 1e-9) lateral = Vector3d::UnitX();
        lateral.normalize();
        Vector3d center = base.opticalCenter();
        for (int attempt = 0; attempt < 20; ++attempt) {
          const double side = rng() % 2 == 0 ? 1.0 : -1.0;
          const Vector3d c = base.opticalCenter() + side * uniform(rng, 0.5, 2.0) * lateral;
          center = c;
          if (inside(c)) break;
        }
        const Eigen::AngleAxisd yaw(uniform(rng, -30.0 * kDeg, 30.0 * kDeg),
                                    Vector3d::UnitZ());
        // Yaw about the world vertical: R' = R * yaw^-1.
        q.pose.rotation =
            (base.rotation * Eigen::Quaterniond(yaw).conjugate()).normalized();
        q.pose.translation = -(q.pose.rotation * center);
        break;
      }
      case QueryStratum::kFreeSpace: {
        q.camera = default_cam;
        const Vector3d box_lo = (kf_lo.array() - 1.0).max(lo.array()).matrix();
        const Vector3d box_hi = (kf_hi.array() + 1.0).min(hi.array()).matrix();
        Vector3d c;
        for (int a = 0; a < 3; ++a) {
          c[a] = box_lo[a] < box_hi[a] ? uniform(rng, box_lo[a], box_hi[a])
                                       : 0.5 * (box_lo[a] + box_hi[a]);
        }
        Vector3d target = centroid;
        if ((target - c).norm() < 1e-6) target += Vector3d::UnitX();
        q.pose = Pose::lookAt(c, target);
        break;
      }
    }
    out.push_back(q);
  }
  return out;
}

// Scene spec JSON.

SceneSpec parseSceneSpec(const std::string& json_text) {
  using namespace detail::json_fields;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scene spec: expected an object");
  static const std::set<std::string> known{
      "n_landmarks", "n_keyframes", "trajectory", "placement", "camera",
      "noise_px", "seed", "room", "camera_height", "depth_window",
      "max_view_angle_deg", "min_observations"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!known.count(it.key())) throw ParseError("scene spec: unknown field '" + it.key() + "'");
  }
  const std::string w = "scene";
  SceneSpec s;
  auto count = [&](const char* name, std::size_t& out) {
    if (!doc.contains(name)) return;
    const std::int64_t v = integer(doc, name, w);
    if (v < 0) throw ParseError(w + "." + name + ": must be non-negative");
    out = static_cast<std::size_t>(v);
  };
  count("n_landmarks", s.n_landmarks);
  count("n_keyframes", s.n_keyframes);
  count("min_observations", s.min_observations);
  if (doc.contains("seed")) {
    const json& v = field(doc, "seed", w);
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      throw ParseError(w + ".seed: expected an integer");
    }
    s.seed = v.get<std::uint64_t>();
  }
  if (doc.contains("trajectory")) {
    const json& t = field(doc, "trajectory", w);
    const std::string name = t.is_string() ? t.get<std::string>() : "";
    if (name == "loop") s.trajectory = TrajectoryKind::kLoop;
    else if (name == "corridor") s.trajectory = TrajectoryKind::kCorridor;
    else if (name == "random-walk") s.trajectory = TrajectoryKind::kRandomWalk;
    else throw ParseError(w + ".trajectory: expected loop, corridor or random-walk");
  }
  if (doc.contains("placement")) {
    const json& p = field(doc, "placement", w);
    if (p.is_string() && p.get<std::string>() == "uniform-box") {
      s.placement = PlacementKind::kUniformBox;
    } else if (p.is_object()) {
      const json& kind = field(p, "kind", w + ".placement");
      if (!kind.is_string()) throw ParseError(w + ".placement.kind: expected a string");
      if (kind.get<std::string>() == "uniform-box") {
        s.placement = PlacementKind::kUniformBox;
      } else if (kind.get<std::string>() == "clustered") {
        s.placement = PlacementKind::kClustered;
        const std::int64_t k = integer(p, "k", w + ".placement");
        if (k < 1) throw ParseError(w + ".placement.k: must be >= 1");
        s.clusters = static_cast<std::size_t>(k);
        s.cluster_sigma = number(p, "sigma", w + ".placement");
      } else {
        throw ParseError(w + ".placement.kind: expected uniform-box or clustered");
      }
    } else {
      throw ParseError(w + ".placement: expected \"uniform-box\" or an object");
    }
  }
  if (doc.contains("camera")) {
    const json& c = field(doc, "camera", w);
    const std::string cw = w + ".camera";
    s.camera.fx = number(c, "fx", cw);
    s.camera.fy = number(c, "fy", cw);
    s.camera.cx = number(c, "cx", cw);
    s.camera.cy = number(c, "cy", cw);
    s.camera.width = static_cast<int>(integer(c, "width", cw));
    s.camera.height = static_cast<int>(integer(c, "height", cw));
  }
  if (doc.contains("noise_px")) s.noise_px = number(doc, "noise_px", w);
  if (doc.contains("room")) s.room = vec<3>(doc, "room", w);
  if (doc.contains("camera_height")) s.camera_height = number(doc, "camera_height", w);
  if (doc.contains("depth_window")) {
    const auto d = vec<2>(doc, "depth_window", w);
    s.depth_min = d[0];
    s.depth_max = d[1];
  }
  if (doc.contains("max_view_angle_deg")) {
    s.max_view_angle_deg = number(doc, "max_view_angle_deg", w);
  }
  s.validate();
  return s;
}

SceneSpec loadSceneSpec(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parseSceneSpec(ss.str());
}

std::string serializeSceneSpec(const SceneSpec& s) {
  nlohmann::ordered_json j;
  j["n_landmarks"] = s.n_landmarks;
  j["n_keyframes"] = s.n_keyframes;
  j["trajectory"] = std::string(toString(s.trajectory));
  if (s.placement == PlacementKind::kUniformBox) {
    j["placement"] = "uniform-box";
  } else {
    j["placement"] = {{"kind", "clustered"}, {"k", s.clusters}, {"sigma", s.cluster_sigma}};
  }
  j["camera"] = {{"fx", s.camera.fx}, {"fy", s.camera.fy}, {"cx", s.camera.cx},
                 {"cy", s.camera.cy}, {"width", s.camera.width},
                 {"height", s.camera.height}};
  j["noise_px"] = s.noise_px;
  j["seed"] = s.seed;
  j["room"] = {s.room.x(), s.room.y(), s.room.z()};
  j["camera_height"] = s.camera_height;
  j["depth_window"] = {s.depth_min, s.depth_max};
  j["max_view_angle_deg"] = s.max_view_angle_deg;
  j["min_observations"] = s.min_observations;
  return j.dump();
}

}  // namespace mapsparse
