#include "mapsparse/eval.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json_fields.hpp"
#include "mapsparse/error.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace mapsparse {

std::string_view toString(QueryStratum s) {
  switch (s) {
    case QueryStratum::kOnTrajectory: return "on-trajectory";
    case QueryStratum::kOffset: return "offset";
    case QueryStratum::kFreeSpace: return "free-space";
  }
  return "?";
}

QueryStratum parseQueryStratum(std::string_view s) {
  for (QueryStratum q : kAllStrata) {
    if (toString(q) == s) return q;
  }
  throw ConfigError("unknown query stratum '" + std::string(s) +
                    "' (expected on-trajectory, offset or free-space)");
}

LocalizeResult localize(const Map& map, const RegionSet& regions,
                        std::span<const std::uint8_t> selected,
                        const QueryView& query, int threshold) {
  if (selected.size() != map.numLandmarks() || regions.size() != map.numLandmarks()) {
    throw ContractViolation("selection or region count differs from landmark count");
  }
  const Eigen::Vector3d center = query.pose.opticalCenter();
  const auto landmarks = map.landmarks();
  LocalizeResult out;
  for (std::size_t j = 0; j < landmarks.size(); ++j) {
    if (!selected[j] || !regions[j]) continue;
    const Eigen::Vector3d& p = landmarks[j].position;
    if (!project(query.camera, query.pose, p)) continue;
    if (isVisible(*regions[j], p, center)) ++out.matched;
  }
  out.success = out.matched >= static_cast<std::size_t>(std::max(threshold, 0));
  return out;
}

const StratumReport* EvalReport::stratum(QueryStratum s) const {
  for (const auto& r : strata) {
    if (r.stratum == s) return &r;
  }
  return nullptr;
}

EvalReport localizationRate(const Map& map, const RegionSet& regions,
                            std::span<const std::uint8_t> selected,
                            std::span<const QueryView> queries, int threshold,
                            int workers) {
  if (queries.empty()) throw ContractViolation("empty query list");
  EvalReport rep;
  rep.total = queries.size();
  rep.matched.assign(queries.size(), 0);
  std::vector<std::uint8_t> ok(queries.size(), 0);
  detail::parallelChunks(queries.size(), workers,
                         [&](std::size_t b, std::size_t e, std::size_t) {
                           for (std::size_t i = b; i < e; ++i) {
                             const auto r = localize(map, regions, selected,
                                                     queries[i], threshold);
                             rep.matched[i] = r.matched;
                             ok[i] = r.success ? 1 : 0;
                           }
                         });
  for (QueryStratum s : kAllStrata) {
    StratumReport sr;
    sr.stratum = s;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (queries[i].label != s) continue;
      ++sr.total;
      sr.localized += ok[i];
    }
    if (sr.total == 0) continue;
    sr.rate = static_cast<double>(sr.localized) / static_cast<double>(sr.total);
    rep.localized += sr.localized;
    rep.strata.push_back(sr);
  }
  rep.rate = static_cast<double>(rep.localized) / static_cast<double>(rep.total);
  return rep;
}

CompressionReport compressionReport(std::span<const std::uint8_t> selected) {
  CompressionReport r;
  r.total = selected.size();
  for (std::uint8_t v : selected) r.selected += v ? 1 : 0;
  r.ratio = r.total == 0 ? 0.0
                         : static_cast<double>(r.selected) / static_cast<double>(r.total);
  return r;
}

std::size_t countValidCells(const Map& map, const RegionSet& regions,
                            std::span<const std::uint8_t> selected,
                            const Grid3DConfig& grid, int k2, int workers) {
  if (selected.size() != map.numLandmarks()) {
    throw ContractViolation("selection length differs from landmark count");
  }
  if (std::none_of(selected.begin(), selected.end(), [](auto v) { return v != 0; })) {
    return 0;
  }
  return validCells(map, regions, grid, k2, workers, selected).cells.size();
}

std::vector<std::uint8_t> selectionFromCompact(const Map& original, const Map& compact) {
  std::set<CameraId> a, b;
  for (const auto& c : original.cameras()) a.insert(c.id);
  for (const auto& c : compact.cameras()) b.insert(c.id);
  if (a != b) {
    throw IntegrityError("camera ids differ between the original and compact maps");
  }
  std::vector<std::uint8_t> sel(original.numLandmarks(), 0);
  for (const auto& lm : compact.landmarks()) {
    const auto idx = original.landmarkIndex(lm.id);
    if (!idx) {
      throw IntegrityError("compact map landmark " + std::to_string(lm.id) +
                           " is not in the original map");
    }
    sel[*idx] = 1;
  }
  return sel;
}

std::string serializeQueries(std::span<const QueryView> queries) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    const auto& r = q.pose.rotation;
    const auto& t = q.pose.translation;
    out += "  {\"q\":[";
    const double qv[] = {r.w(), r.x(), r.y(), r.z()};
    for (int k = 0; k < 4; ++k) {
      if (k) out += ',';
      detail::appendDouble(out, qv[k]);
    }
    out += "],\"t\":[";
    for (int k = 0; k < 3; ++k) {
      if (k) out += ',';
      detail::appendDouble(out, t[k]);
    }
    out += "],\"camera_id\":" + std::to_string(q.camera.id) + ",\"label\":\"" +
           std::string(toString(q.label)) + "\"}";
    out += i + 1 < queries.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::vector<QueryView> parseQueries(const std::string& json_text, const Map& map) {
  using namespace detail::json_fields;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("queries: expected an array");
  std::vector<QueryView> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string w = at("queries", i);
    QueryView q;
    const Eigen::Vector4d qv = vec<4>(doc[i], "q", w);
    Eigen::Quaterniond rot(qv[0], qv[1], qv[2], qv[3]);
    const double nrm = rot.norm();
    if (std::abs(nrm - 1.0) > 1e-6) {
      throw IntegrityError(w + ".q: quaternion is not unit length");
    }
    if (std::abs(nrm - 1.0) > 1e-12) rot.normalize();
    q.pose.rotation = rot;
    q.pose.translation = vec<3>(doc[i], "t", w);
    const CameraId cid = integer(doc[i], "camera_id", w);
    const CameraModel* cam = map.cameraById(cid);
    if (cam == nullptr) {
      throw IntegrityError(w + ".camera_id: unknown camera " + std::to_string(cid));
    }
    q.camera = *cam;
    const json& label = field(doc[i], "label", w);
    if (!label.is_string()) throw ParseError(w + ".label: expected a string");
    try {
      q.label = parseQueryStratum(label.get<std::string>());
    } catch (const ConfigError&) {
      throw ParseError(w + ".label: unknown stratum '" + label.get<std::string>() + "'");
    }
    out.push_back(q);
  }
  return out;
}

void saveQueries(std::span<const QueryView> queries, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << serializeQueries(queries);
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<QueryView> loadQueries(const std::filesystem::path& path, const Map& map) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parseQueries(ss.str(), map);
}

std::string formatCsv(std::span<const CsvRow> rows, std::string_view comment) {
  std::string out;
  std::istringstream lines{std::string(comment)};
  for (std::string line; std::getline(lines, line);) out += "# " + line + "\n";
  out += kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.method + ',' + r.stratum + ',' + std::to_string(r.total) + ',' +
           std::to_string(r.localized) + ',';
    detail::appendDouble(out, r.rate);
    out += ',';
    detail::appendDouble(out, r.ratio);
    out += ',';
    if (r.valid_cells) out += std::to_string(*r.valid_cells);
    out += '\n';
  }
  return out;
}

}  // namespace mapsparse
