#include "mapsparse/grid2d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mapsparse/error.hpp"

namespace mapsparse {

CellIndex cellIndex(const Grid2DConfig& config, const CameraModel& camera,
                    const Eigen::Vector2d& pixel) {
  if (!camera.contains(pixel)) {
    throw ContractViolation("pixel (" + std::to_string(pixel.x()) + ", " +
                            std::to_string(pixel.y()) +
                            ") is outside the image");
  }
  int col = static_cast<int>(std::floor(pixel.x() * config.cols / camera.width));
  int row = static_cast<int>(std::floor(pixel.y() * config.rows / camera.height));
  // Rounding in the products can land exactly on the upper edge.
  col = std::clamp(col, 0, config.cols - 1);
  row = std::clamp(row, 0, config.rows - 1);
  return {col, row};
}

void validateGrid(const Grid2DConfig& config, const Map& map) {
  if (config.cols < 1 || config.rows < 1) {
    throw ConfigError("grid2d needs at least one column and one row");
  }
  for (const auto& cam : map.cameras()) {
    if (config.cols > cam.width || config.rows > cam.height) {
      throw ConfigError("grid2d " + std::to_string(config.cols) + "x" +
                        std::to_string(config.rows) + " is finer than camera " +
                        std::to_string(cam.id) + " (" + std::to_string(cam.width) +
                        "x" + std::to_string(cam.height) + " pixels)");
    }
  }
}

std::vector<CellOccupancy> occupiedCells(const Map& map,
                                         const Grid2DConfig& config) {
  validateGrid(config, map);
  std::vector<CellOccupancy> out;
  std::map<int, std::vector<LandmarkId>> cells;
  for (std::size_t k = 0; k < map.numKeyframes(); ++k) {
    const Keyframe& kf = map.keyframes()[k];
    const CameraModel& cam = map.cameraOf(k);
    cells.clear();
    for (const auto& ob : map.observationsOfKeyframe(k)) {
      const Landmark& lm = map.landmarks()[ob.landmark];
      auto uv = project(cam, kf.pose, lm.position);
      if (!uv) continue;
      const CellIndex c = cellIndex(config, cam, *uv);
      cells[c.linear(config)].push_back(lm.id);
    }
    for (auto& [linear, ids] : cells) {
      out.push_back({kf.id, {linear % config.cols, linear / config.cols},
                     std::move(ids)});
    }
  }
  return out;
}

OccupancyMatrix occupancyMatrix(const Map& map, const Grid2DConfig& config) {
  validateGrid(config, map);
  OccupancyMatrix out;
  out.matrix = BinaryMatrix(0, map.numLandmarks());
  std::map<int, std::vector<std::uint32_t>> cells;
  for (std::size_t k = 0; k < map.numKeyframes(); ++k) {
    const Keyframe& kf = map.keyframes()[k];
    const CameraModel& cam = map.cameraOf(k);
    cells.clear();
    // Observations are sorted by landmark index, so each cell list is too.
    for (const auto& ob : map.observationsOfKeyframe(k)) {
      auto uv = project(cam, kf.pose, map.landmarks()[ob.landmark].position);
      if (!uv) continue;
      cells[cellIndex(config, cam, *uv).linear(config)].push_back(ob.landmark);
    }
    for (const auto& [linear, cols] : cells) {
      out.matrix.appendRow(cols);
      out.labels.push_back({kf.id, {linear % config.cols, linear / config.cols}});
    }
  }
  return out;
}

}  // namespace mapsparse
