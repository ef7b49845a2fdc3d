#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mapsparse/binary_matrix.hpp"
#include "mapsparse/map_model.hpp"

namespace mapsparse {

// Visibility region of one landmark: a truncated spherical cone around the
// mean viewing direction (landmark -> camera center).
struct VisibilityRegion {
  Eigen::Vector3d mean_dir = Eigen::Vector3d::UnitZ();
  double theta_th = 0.0;  // radians
  double d_min = 0.0;     // meters
  double d_max = 0.0;     // meters
  // Set when the viewing directions cancelled out and the first
  // observation's direction was used instead.
  bool direction_fallback = false;
};

struct VisibilityMargins {
  double dist_lo = 0.8;
  double dist_hi = 1.3;
  double theta_floor = 10.0 * 3.14159265358979323846 / 180.0;
};

// Indexed by landmark; empty for landmarks without observations.
using RegionSet = std::vector<std::optional<VisibilityRegion>>;

// Throws ContractViolation when the landmark has no observations.
VisibilityRegion fitVisibility(const Map& map, std::size_t landmark_index,
                               const VisibilityMargins& margins = {});
RegionSet fitAllVisibility(const Map& map,
                           const VisibilityMargins& margins = {},
                           int workers = 1);

// angle(mean_dir, query - landmark) < theta_th and
// d_min < |query - landmark| < d_max.
bool isVisible(const VisibilityRegion& region,
               const Eigen::Vector3d& landmark_pos,
               const Eigen::Vector3d& query_center);

struct Box {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
};

// Lattice of cell centers min + (i,j,k) * resolution covering the box,
// both ends included.
struct Grid3DConfig {
  double resolution = 0.5;
  Box bounds;
  std::size_t max_cells = 2'000'000;

  std::array<int, 3> dims() const;
  std::size_t cellCount() const;
  Eigen::Vector3d cellCenter(int i, int j, int k) const {
    return bounds.min + resolution * Eigen::Vector3d(i, j, k);
  }
  // Throws ConfigError on a bad resolution, empty box, or too many cells.
  void validate() const;
};

// Bounding box of keyframe centers and landmarks padded by a low quantile of
// the fitted d_max values.
Box autoBounds(const Map& map, const RegionSet& regions);
inline constexpr double kAutoBoundsPadQuantile = 0.1;

struct ValidCell {
  std::array<int, 3> index{};
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  std::vector<LandmarkId> visible_landmark_ids;
};

struct ValidCellSet {
  std::vector<ValidCell> cells;  // lexicographic (i, j, k)
  BinaryMatrix matrix;           // S x N, C[g][j] = landmark j visible from g
};

// Cells whose center sees at least k2 landmarks. When `selected` is
// non-empty only landmarks with selected[j] != 0 are counted.
ValidCellSet validCells(const Map& map, const RegionSet& regions,
                        const Grid3DConfig& grid, int k2, int workers = 1,
                        std::span<const std::uint8_t> selected = {});

}  // namespace mapsparse
