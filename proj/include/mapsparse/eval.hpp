#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mapsparse/map_model.hpp"
#include "mapsparse/visibility3d.hpp"

namespace mapsparse {

enum class QueryStratum { kOnTrajectory, kOffset, kFreeSpace };
inline constexpr QueryStratum kAllStrata[] = {
    QueryStratum::kOnTrajectory, QueryStratum::kOffset, QueryStratum::kFreeSpace};
std::string_view toString(QueryStratum s);  // on-trajectory | offset | free-space
QueryStratum parseQueryStratum(std::string_view s);

struct QueryView {
  Pose pose;  // world -> camera
  CameraModel camera;
  QueryStratum label = QueryStratum::kOnTrajectory;
};

struct LocalizeResult {
  bool success = false;
  std::size_t matched = 0;
};

// Geometric localization oracle: counts selected landmarks that project into
// the query image and whose (original-map) visibility region contains the
// query's optical center. Success when matched >= threshold.
LocalizeResult localize(const Map& map, const RegionSet& regions,
                        std::span<const std::uint8_t> selected,
                        const QueryView& query, int threshold);

struct StratumReport {
  QueryStratum stratum = QueryStratum::kOnTrajectory;
  std::size_t total = 0;
  std::size_t localized = 0;
  double rate = 0.0;
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t localized = 0;
  double rate = 0.0;
  std::vector<std::size_t> matched;    // per query, input order
  std::vector<StratumReport> strata;   // strata present, fixed order
  const StratumReport* stratum(QueryStratum s) const;
};

// Throws ContractViolation on an empty query list.
EvalReport localizationRate(const Map& map, const RegionSet& regions,
                            std::span<const std::uint8_t> selected,
                            std::span<const QueryView> queries, int threshold,
                            int workers = 1);

struct CompressionReport {
  std::size_t selected = 0;
  std::size_t total = 0;
  double ratio = 0.0;  // selected / total
};

CompressionReport compressionReport(std::span<const std::uint8_t> selected);

// Valid 3D cells when only the selected landmarks are kept.
std::size_t countValidCells(const Map& map, const RegionSet& regions,
                            std::span<const std::uint8_t> selected,
                            const Grid3DConfig& grid, int k2, int workers = 1);

// Selection vector over `original` marking the landmarks present in
// `compact` (matched by id). Throws IntegrityError when the compact map has
// landmarks or cameras the original lacks.
std::vector<std::uint8_t> selectionFromCompact(const Map& original,
                                               const Map& compact);

// Query sets: JSON list of {q:[w,x,y,z], t:[x,y,z], camera_id, label}.
std::string serializeQueries(std::span<const QueryView> queries);
std::vector<QueryView> parseQueries(const std::string& json_text, const Map& map);
void saveQueries(std::span<const QueryView> queries, const std::filesystem::path& path);
std::vector<QueryView> loadQueries(const std::filesystem::path& path, const Map& map);

// One CSV row per (method, stratum).
struct CsvRow {
  std::string method;
  std::string stratum;
  std::size_t total = 0;
  std::size_t localized = 0;
  double rate = 0.0;
  double ratio = 0.0;
  std::optional<std::size_t> valid_cells;  // empty cell when not computed
};

inline constexpr std::string_view kCsvHeader =
    "method,stratum,total,localized,rate,ratio,valid_cells";

// `comment` lines are written first, each prefixed with "# ".
std::string formatCsv(std::span<const CsvRow> rows, std::string_view comment = {});

}  // namespace mapsparse
