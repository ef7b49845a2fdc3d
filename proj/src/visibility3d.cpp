#include "mapsparse/visibility3d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mapsparse/error.hpp"
#include "parallel.hpp"

namespace mapsparse {
namespace {

// The fitted angle is widened by this much so the generating observation at
// the maximum angle satisfies the strict inequality.
constexpr double kAngleSlack = 1e-7;

// Precomputed per-landmark test in the form used by the grid scans.
struct ConeTest {
  Eigen::Vector3d p;
  Eigen::Vector3d m;
  double cos_th;
  double dmin2;
  double dmax2;
  double dmax;
  std::uint32_t landmark;

  bool visibleFrom(const Eigen::Vector3d& c) const {
    const Eigen::Vector3d v = c - p;
    const double d2 = v.squaredNorm();
    if (!(d2 > dmin2 && d2 < dmax2)) return false;
    return v.dot(m) > cos_th * std::sqrt(d2);
  }
};

std::vector<ConeTest> prepareTests(const Map& map, const RegionSet& regions,
                                   std::span<const std::uint8_t> selected) {
  std::vector<ConeTest> tests;
  for (std::size_t j = 0; j < map.numLandmarks(); ++j) {
    if (!regions[j]) continue;
    if (!selected.empty() && !selected[j]) continue;
    const VisibilityRegion& r = *regions[j];
    tests.push_back({map.landmarks()[j].position, r.mean_dir,
                     std::cos(r.theta_th), r.d_min * r.d_min,
                     r.d_max * r.d_max, r.d_max,
                     static_cast<std::uint32_t>(j)});
  }
  return tests;
}

struct IndexRange {
  int lo[3];
  int hi[3];  // inclusive; empty when lo > hi on any axis
};

IndexRange sphereRange(const Grid3DConfig& grid, const std::array<int, 3>& dims,
                       const ConeTest& t) {
  IndexRange r{};
  for (int a = 0; a < 3; ++a) {
    const double lo = (t.p[a] - t.dmax - grid.bounds.min[a]) / grid.resolution;
    const double hi = (t.p[a] + t.dmax - grid.bounds.min[a]) / grid.resolution;
    r.lo[a] = std::max(0, static_cast<int>(std::ceil(lo)));
    r.hi[a] = std::min(dims[a] - 1, static_cast<int>(std::floor(hi)));
  }
  return r;
}

}  // namespace

VisibilityRegion fitVisibility(const Map& map, std::size_t landmark_index,
                               const VisibilityMargins& margins) {
  const auto obs = map.observationsOfLandmark(landmark_index);
  const Landmark& lm = map.landmarks()[landmark_index];
  if (obs.empty()) {
    throw ContractViolation("landmark " + std::to_string(lm.id) +
                            " has no observations to fit visibility from");
  }
  std::vector<Eigen::Vector3d> dirs;
  dirs.reserve(obs.size());
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (std::uint32_t oi : obs) {
    const auto& ob = map.observations()[oi];
    const Eigen::Vector3d v =
        map.keyframes()[ob.keyframe].pose.opticalCenter() - lm.position;
    const double d = v.norm();
    if (!(d > 0.0)) {
      throw ContractViolation("landmark " + std::to_string(lm.id) +
                              " coincides with an observing camera center");
    }
    dirs.push_back(v / d);
    sum += dirs.back();
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }

  VisibilityRegion region;
  if (sum.norm() < 1e-9 * static_cast<double>(obs.size())) {
    region.mean_dir = dirs.front();
    region.direction_fallback = true;
  } else {
    region.mean_dir = sum.normalized();
  }
  double max_angle = 0.0;
  for (const auto& u : dirs) {
    max_angle = std::max(
        max_angle, std::acos(std::clamp(region.mean_dir.dot(u), -1.0, 1.0)));
  }
  region.theta_th = std::min(
      std::numbers::pi, std::max(margins.theta_floor, max_angle + kAngleSlack));
  region.d_min = margins.dist_lo * dmin;
  region.d_max = margins.dist_hi * dmax;
  return region;
}

RegionSet fitAllVisibility(const Map& map, const VisibilityMargins& margins,
                           int workers) {
  if (!(margins.dist_lo > 0.0 && margins.dist_lo < 1.0 &&
        margins.dist_hi > 1.0 && margins.theta_floor > 0.0 &&
        margins.theta_floor <= std::numbers::pi)) {
    throw ConfigError(
        "visibility margins need 0 < lo < 1 < hi and 0 < theta_floor <= pi");
  }
  RegionSet regions(map.numLandmarks());
  detail::parallelChunks(map.numLandmarks(), workers,
                         [&](std::size_t b, std::size_t e, std::size_t) {
                           for (std::size_t j = b; j < e; ++j) {
                             if (map.observationsOfLandmark(j).empty()) continue;
                             regions[j] = fitVisibility(map, j, margins);
                           }
                         });
  return regions;
}

bool isVisible(const VisibilityRegion& region,
               const Eigen::Vector3d& landmark_pos,
               const Eigen::Vector3d& query_center) {
  const Eigen::Vector3d v = query_center - landmark_pos;
  const double d = v.norm();
  if (!(d > region.d_min && d < region.d_max)) return false;
  const double c = std::clamp(region.mean_dir.dot(v) / d, -1.0, 1.0);
  return std::acos(c) < region.theta_th;
}

std::array<int, 3> Grid3DConfig::dims() const {
  std::array<int, 3> d{};
  for (int a = 0; a < 3; ++a) {
    const double extent = bounds.max[a] - bounds.min[a];
    const double cells = std::floor(extent / resolution + 1e-9) + 1.0;
    d[a] = cells > 1e9 ? 1'000'000'000 : static_cast<int>(cells);
  }
  return d;
}

std::size_t Grid3DConfig::cellCount() const {
  const auto d = dims();
  return static_cast<std::size_t>(d[0]) * static_cast<std::size_t>(d[1]) *
         static_cast<std::size_t>(d[2]);
}

void Grid3DConfig::validate() const {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw ConfigError("grid3d resolution must be positive");
  }
  if (!bounds.min.allFinite() || !bounds.max.allFinite() ||
      !(bounds.max.array() > bounds.min.array()).all()) {
    throw ConfigError("grid3d bounds must be a nonempty finite box");
  }
  const auto d = dims();
  const double cells = static_cast<double>(d[0]) * d[1] * d[2];
  if (cells > static_cast<double>(max_cells)) {
    throw ConfigError("grid3d would have " +
                      std::to_string(static_cast<long long>(cells)) +
                      " cells, above the cap of " + std::to_string(max_cells) +
                      "; use a coarser --grid3d-res or tighter --bounds");
  }
}

Box autoBounds(const Map& map, const RegionSet& regions) {
  Box box;
  box.min = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  box.max = -box.min;
  for (const auto& kf : map.keyframes()) {
    const Eigen::Vector3d c = kf.pose.opticalCenter();
    box.min = box.min.cwiseMin(c);
    box.max = box.max.cwiseMax(c);
  }
  for (const auto& lm : map.landmarks()) {
    box.min = box.min.cwiseMin(lm.position);
    box.max = box.max.cwiseMax(lm.position);
  }
  if (!box.min.allFinite()) {
    throw ConfigError("cannot derive grid3d bounds from an empty map");
  }
  std::vector<double> dmax;
  for (const auto& r : regions) {
    if (r) dmax.push_back(r->d_max);
  }
  double pad = 0.0;
  if (!dmax.empty()) {
    const std::size_t q = static_cast<std::size_t>(
        kAutoBoundsPadQuantile * static_cast<double>(dmax.size() - 1));
    std::nth_element(dmax.begin(), dmax.begin() + q, dmax.end());
    pad = dmax[q];
  }
  box.min.array() -= pad;
  box.max.array() += pad;
  for (int a = 0; a < 3; ++a) {
    if (!(box.max[a] > box.min[a])) {
      box.min[a] -= 0.5;
      box.max[a] += 0.5;
    }
  }
  return box;
}

ValidCellSet validCells(const Map& map, const RegionSet& regions,
                        const Grid3DConfig& grid, int k2, int workers,
                        std::span<const std::uint8_t> selected) {
  grid.validate();
  if (k2 < 1) throw ConfigError("k2 must be a positive integer");
  if (regions.size() != map.numLandmarks()) {
    throw ContractViolation("region set does not match the map");
  }
  if (!selected.empty() && selected.size() != map.numLandmarks()) {
    throw ContractViolation("selection length does not match landmark count");
  }
  const std::vector<ConeTest> tests = prepareTests(map, regions, selected);
  const auto dims = grid.dims();
  const std::size_t nx = static_cast<std::size_t>(dims[0]);
  const std::size_t plane = static_cast<std::size_t>(dims[1]) * dims[2];

  // Pick the cheaper traversal: every cell against every landmark, or every
  // landmark against the cells inside its distance sphere (done twice).
  double sphere_cost = 0.0;
  for (const auto& t : tests) {
    const IndexRange r = sphereRange(grid, dims, t);
    double c = 1.0;
    for (int a = 0; a < 3; ++a) c *= std::max(0, r.hi[a] - r.lo[a] + 1);
    sphere_cost += c;
  }
  const double cell_cost =
      static_cast<double>(grid.cellCount()) * static_cast<double>(tests.size());
  const bool cell_major = cell_cost <= 2.0 * sphere_cost;

  // Each chunk owns a slab of i-indices and emits its cells in lexicographic
  // order, so concatenating chunks keeps the global order.
  struct Chunk {
    std::vector<ValidCell> cells;
    std::vector<std::vector<std::uint32_t>> cols;
  };
  const std::size_t nchunks = detail::chunkCount(nx, workers);
  std::vector<Chunk> chunks(nchunks);

  auto emit = [&](Chunk& out, int i, int j, int k,
                  std::vector<std::uint32_t>&& cols) {
    ValidCell cell;
    cell.index = {i, j, k};
    cell.center = grid.cellCenter(i, j, k);
    cell.visible_landmark_ids.reserve(cols.size());
    for (std::uint32_t c : cols) {
      cell.visible_landmark_ids.push_back(map.landmarks()[c].id);
    }
    out.cells.push_back(std::move(cell));
    out.cols.push_back(std::move(cols));
  };

  detail::parallelChunks(nx, workers, [&](std::size_t b, std::size_t e,
                                          std::size_t chunk) {
    Chunk& out = chunks[chunk];
    if (cell_major) {
      std::vector<std::uint32_t> cols;
      for (std::size_t i = b; i < e; ++i) {
        for (int j = 0; j < dims[1]; ++j) {
          for (int k = 0; k < dims[2]; ++k) {
            const Eigen::Vector3d c =
                grid.cellCenter(static_cast<int>(i), j, k);
            cols.clear();
            for (const auto& t : tests) {
              if (t.visibleFrom(c)) cols.push_back(t.landmark);
            }
            if (static_cast<int>(cols.size()) >= k2) {
              emit(out, static_cast<int>(i), j, k, std::vector(cols));
            }
          }
        }
      }
      return;
    }
    // Landmark-major over this slab: count, then fill qualifying cells.
    const std::size_t slab_cells = (e - b) * plane;
    std::vector<std::uint32_t> count(slab_cells, 0);
    auto scan = [&](auto&& visit) {
      for (const auto& t : tests) {
        IndexRange r = sphereRange(grid, dims, t);
        r.lo[0] = std::max(r.lo[0], static_cast<int>(b));
        r.hi[0] = std::min(r.hi[0], static_cast<int>(e) - 1);
        for (int i = r.lo[0]; i <= r.hi[0]; ++i) {
          for (int j = r.lo[1]; j <= r.hi[1]; ++j) {
            for (int k = r.lo[2]; k <= r.hi[2]; ++k) {
              if (t.visibleFrom(grid.cellCenter(i, j, k))) {
                visit((static_cast<std::size_t>(i) - b) * plane +
                          static_cast<std::size_t>(j) * dims[2] + k,
                      t.landmark);
              }
            }
          }
        }
      }
    };
    scan([&](std::size_t cell, std::uint32_t) { ++count[cell]; });
    std::vector<std::int64_t> slot(slab_cells, -1);
    std::vector<std::vector<std::uint32_t>> lists;
    for (std::size_t c = 0; c < slab_cells; ++c) {
      if (static_cast<int>(count[c]) >= k2) {
        slot[c] = static_cast<std::int64_t>(lists.size());
        lists.emplace_back();
        lists.back().reserve(count[c]);
      }
    }
    scan([&](std::size_t cell, std::uint32_t lm) {
      if (slot[cell] >= 0) lists[slot[cell]].push_back(lm);
    });
    for (std::size_t c = 0; c < slab_cells; ++c) {
      if (slot[c] < 0) continue;
      const int i = static_cast<int>(b + c / plane);
      const int j = static_cast<int>((c % plane) / dims[2]);
      const int k = static_cast<int>(c % dims[2]);
      emit(out, i, j, k, std::move(lists[slot[c]]));
    }
  });

  ValidCellSet result;
  result.matrix = BinaryMatrix(0, map.numLandmarks());
  for (auto& ch : chunks) {
    for (std::size_t g = 0; g < ch.cells.size(); ++g) {
      result.matrix.appendRow(ch.cols[g]);
      result.cells.push_back(std::move(ch.cells[g]));
    }
  }
  return result;
}

}  // namespace mapsparse
