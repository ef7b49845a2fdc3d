#pragma once

#include <cstdint>
#include <vector>

#include "mapsparse/binary_matrix.hpp"
#include "mapsparse/map_model.hpp"

namespace mapsparse {

// Uniform C x R partition of every keyframe image.
struct Grid2DConfig {
  int cols = 8;
  int rows = 6;

  int cellCount() const { return cols * rows; }
};

struct CellIndex {
  int col = 0;
  int row = 0;

  int linear(const Grid2DConfig& g) const { return row * g.cols + col; }
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

// Throws ContractViolation when the pixel is outside the image.
CellIndex cellIndex(const Grid2DConfig& config, const CameraModel& camera,
                    const Eigen::Vector2d& pixel);

struct CellOccupancy {
  KeyframeId keyframe_id = 0;
  CellIndex cell;
  std::vector<LandmarkId> landmark_ids;  // ascending, never empty
};

struct CellLabel {
  KeyframeId keyframe_id = 0;
  CellIndex cell;
};

// B matrix: one row per occupied (keyframe, cell), ordered by keyframe id then
// row-major cell order. Membership uses reprojected landmark positions, not
// stored pixels; out-of-image reprojections are skipped.
struct OccupancyMatrix {
  BinaryMatrix matrix;
  std::vector<CellLabel> labels;
};

// Throws ConfigError when the grid has no cells or is finer than a camera's
// pixel raster along either axis.
void validateGrid(const Grid2DConfig& config, const Map& map);

std::vector<CellOccupancy> occupiedCells(const Map& map,
                                         const Grid2DConfig& config);
OccupancyMatrix occupancyMatrix(const Map& map, const Grid2DConfig& config);

}  // namespace mapsparse
