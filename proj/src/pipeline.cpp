#include "mapsparse/pipeline.hpp"

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mapsparse/baselines.hpp"
#include "mapsparse/error.hpp"
#include "text_util.hpp"

namespace mapsparse {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> splitList(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parseDouble(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(what) + ": '" + s + "' is not a number");
}

Grid2DConfig parseGrid2D(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw ConfigError("grid2d: expected COLSxROWS, got '" + s + "'");
  Grid2DConfig g;
  try {
    g.cols = std::stoi(s.substr(0, x));
    g.rows = std::stoi(s.substr(x + 1));
  } catch (const std::exception&) {
    throw ConfigError("grid2d: expected COLSxROWS, got '" + s + "'");
  }
  if (g.cols < 1 || g.rows < 1) throw ConfigError("grid2d: cell counts must be positive");
  return g;
}

std::optional<Box> parseBounds(const std::string& s) {
  if (s == "auto") return std::nullopt;
  const auto parts = splitList(s, ',');
  if (parts.size() != 6) throw ConfigError("bounds: expected auto or x0,y0,z0,x1,y1,z1");
  Box b;
  for (int i = 0; i < 3; ++i) {
    b.min[i] = parseDouble(parts[i], "bounds");
    b.max[i] = parseDouble(parts[i + 3], "bounds");
  }
  return b;
}

std::string boundsText(const std::optional<Box>& b) {
  if (!b) return "auto";
  std::string out;
  for (int i = 0; i < 6; ++i) {
    if (i) out += ',';
    detail::appendDouble(out, i < 3 ? b->min[i] : b->max[i - 3]);
  }
  return out;
}

// Accepts a JSON number or a numeric string (INI values arrive as strings).
double asNumber(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parseDouble(v.get<std::string>(), key);
  throw ConfigError(key + ": expected a number");
}

std::int64_t asInteger(const json& v, const std::string& key) {
  const double d = asNumber(v, key);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) {
    throw ConfigError(key + ": expected an integer");
  }
  return static_cast<std::int64_t>(d);
}

std::string asString(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key + ": expected a string");
  return v.get<std::string>();
}

// null or "inf" means unlimited.
bool isUnlimited(const json& v) {
  return v.is_null() || (v.is_string() && (v == "inf" || v == "unlimited"));
}

std::size_t countOf(const json& v, const std::string& key) {
  const std::int64_t n = asInteger(v, key);
  if (n < 0) throw ConfigError(key + ": must be non-negative");
  return static_cast<std::size_t>(n);
}

}  // namespace

std::string_view toString(Method m) {
  switch (m) {
    case Method::kLP: return "lp";
    case Method::kOurs2D: return "ours2d";
    case Method::kOurs3D: return "ours3d";
    case Method::kDI: return "di";
    case Method::kGreedy: return "greedy";
  }
  return "?";
}

Method parseMethod(std::string_view s) {
  for (Method m : {Method::kLP, Method::kOurs2D, Method::kOurs3D, Method::kDI, Method::kGreedy}) {
    if (toString(m) == s) return m;
  }
  throw ConfigError("unknown method '" + std::string(s) +
                    "' (expected lp, ours2d, ours3d, di or greedy)");
}

std::string_view toString(SolveMode m) {
  return m == SolveMode::kExact ? "exact" : "heuristic";
}

SolveMode parseSolveMode(std::string_view s) {
  if (s == "exact") return SolveMode::kExact;
  if (s == "heuristic") return SolveMode::kHeuristic;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected exact or heuristic)");
}

void RunConfig::validate() const {
  if (k1 < 0) throw ConfigError("k1 must be non-negative");
  if (k2 < 1) throw ConfigError("k2 must be positive");
  if (lambda1 && *lambda1 < 0) throw ConfigError("lambda1 must be non-negative");
  if (lambda2 < 0 || lambda3 < 0) throw ConfigError("lambda2/lambda3 must be non-negative");
  if (grid2d.cols < 1 || grid2d.rows < 1) throw ConfigError("grid2d cell counts must be positive");
  if (method == Method::kOurs3D && !grid3d_res) {
    throw ConfigError("method ours3d requires a 3D grid resolution (--grid3d-res)");
  }
  if (grid3d_res && !(*grid3d_res > 0)) throw ConfigError("grid3d_res must be positive");
  if (bounds) {
    for (int i = 0; i < 3; ++i) {
      if (!(bounds->max[i] > bounds->min[i])) throw ConfigError("bounds box is empty");
    }
  }
  if (eval.threshold < 0) throw ConfigError("threshold must be non-negative");
  if (eval.strata.empty()) throw ConfigError("at least one query stratum is required");
  limits.validate();
}

MethodParams RunConfig::methodParams() const {
  MethodParams p;
  switch (method) {
    case Method::kLP:
    case Method::kGreedy: p.variant = Variant::kLP; break;
    case Method::kOurs2D: p.variant = Variant::kOurs2D; break;
    case Method::kOurs3D: p.variant = Variant::kOurs3D; break;
    case Method::kDI: p.variant = Variant::kDI; break;
  }
  p.k1 = k1;
  p.k2 = k2;
  p.lambda1 = lambda1;
  p.lambda2 = lambda2;
  p.lambda3 = lambda3;
  p.grid2d = grid2d;
  if (grid3d_res) p.grid3d = Grid3DParams{*grid3d_res, bounds};
  p.weight_scheme = weight_scheme;
  p.workers = limits.workers;
  return p;
}

RunConfig parseRunConfig(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("run config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("run config: expected a JSON object");
  RunConfig c;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "method") c.method = parseMethod(asString(v, k));
    else if (k == "k1") c.k1 = static_cast<int>(asInteger(v, k));
    else if (k == "k2") c.k2 = static_cast<int>(asInteger(v, k));
    else if (k == "lambda1") {
      if (v.is_null() || v == "auto") c.lambda1.reset();
      else c.lambda1 = asNumber(v, k);
    }
    else if (k == "lambda2") c.lambda2 = asNumber(v, k);
    else if (k == "lambda3") c.lambda3 = asNumber(v, k);
    else if (k == "grid2d") c.grid2d = parseGrid2D(asString(v, k));
    else if (k == "grid3d_res") {
      if (v.is_null()) c.grid3d_res.reset();
      else c.grid3d_res = asNumber(v, k);
    }
    else if (k == "bounds") c.bounds = parseBounds(asString(v, k));
    else if (k == "weight_scheme") c.weight_scheme = parseWeightScheme(asString(v, k));
    else if (k == "mode") c.mode = parseSolveMode(asString(v, k));
    else if (k == "time_limit") c.limits.time_limit_s = isUnlimited(v) ? kUnlimited : asNumber(v, k);
    else if (k == "gap") c.limits.gap_limit = asNumber(v, k);
    else if (k == "node_limit") {
      c.limits.node_limit = isUnlimited(v) ? std::numeric_limits<std::size_t>::max() : countOf(v, k);
    }
    else if (k == "workers") c.limits.workers = static_cast<int>(asInteger(v, k));
    else if (k == "lp_engine") {
      const std::string e = asString(v, k);
      if (e == "auto") c.limits.lp.engine = LpEngine::kAuto;
      else if (e == "simplex") c.limits.lp.engine = LpEngine::kSimplex;
      else if (e == "pdhg") c.limits.lp.engine = LpEngine::kPdhg;
      else throw ConfigError("lp_engine: expected auto, simplex or pdhg");
    }
    else if (k == "lp_tolerance") c.limits.lp.tolerance = asNumber(v, k);
    else if (k == "lp_max_iterations") c.limits.lp.max_iterations = countOf(v, k);
    else if (k == "threshold") c.eval.threshold = static_cast<int>(asInteger(v, k));
    else if (k == "strata") {
      c.eval.strata = parseStrataList(asString(v, k));
    }
    else if (k == "queries_per_stratum") c.eval.queries_per_stratum = countOf(v, k);
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(countOf(v, k));
    else if (k == "map") c.map_in = asString(v, k);
    else if (k == "queries") c.queries_in = asString(v, k);
    else if (k == "out") c.map_out = asString(v, k);
    else if (k == "log") c.log_out = asString(v, k);
    else if (k == "report") c.report_out = asString(v, k);
    else if (k == "export_lp") c.lp_out = asString(v, k);
    else throw ConfigError("run config: unknown key '" + k + "'");
  }
  return c;
}

std::string serializeRunConfig(const RunConfig& c, bool include_output_paths) {
  ordered_json j;
  j["method"] = std::string(toString(c.method));
  j["k1"] = c.k1;
  j["k2"] = c.k2;
  j["lambda1"] = c.methodParams().effectiveLambda1();
  j["lambda2"] = c.lambda2;
  j["lambda3"] = c.lambda3;
  j["grid2d"] = std::to_string(c.grid2d.cols) + "x" + std::to_string(c.grid2d.rows);
  j["grid3d_res"] = c.grid3d_res ? json(*c.grid3d_res) : json(nullptr);
  j["bounds"] = boundsText(c.bounds);
  j["weight_scheme"] = std::string(toString(c.weight_scheme));
  j["mode"] = std::string(toString(c.mode));
  j["time_limit"] = std::isinf(c.limits.time_limit_s) ? json(nullptr) : json(c.limits.time_limit_s);
  j["gap"] = c.limits.gap_limit;
  j["node_limit"] = c.limits.node_limit == std::numeric_limits<std::size_t>::max()
                        ? json(nullptr)
                        : json(c.limits.node_limit);
  j["workers"] = c.limits.workers;
  j["lp_engine"] = std::string(toString(c.limits.lp.engine));
  j["lp_tolerance"] = c.limits.lp.tolerance;
  j["lp_max_iterations"] = c.limits.lp.max_iterations;
  j["threshold"] = c.eval.threshold;
  std::string strata;
  for (QueryStratum s : c.eval.strata) {
    if (!strata.empty()) strata += ',';
    strata += toString(s);
  }
  j["strata"] = strata;
  j["queries_per_stratum"] = c.eval.queries_per_stratum;
  j["seed"] = c.seed;
  j["map"] = c.map_in.generic_string();
  j["queries"] = c.queries_in.generic_string();
  if (include_output_paths) {
    j["out"] = c.map_out.generic_string();
    j["log"] = c.log_out.generic_string();
    j["report"] = c.report_out.generic_string();
    j["export_lp"] = c.lp_out.generic_string();
  }
  return j.dump();
}

std::string SolveLog::toJson(const RunConfig& config) const {
  ordered_json j;
  j["method"] = std::string(toString(method));
  j["mode"] = std::string(toString(mode));
  j["n"] = landmarks;
  j["m"] = keyframes;
  j["s"] = valid_cells;
  ordered_json rows = ordered_json::array();
  for (const auto& b : blocks) {
    rows.push_back({{"block", b.name}, {"rows", b.rows}, {"nonzeros", b.nonzeros}});
  }
  j["blocks"] = rows;
  j["selected"] = selected;
  j["objective"] = objective;
  j["bound"] = bound;
  j["gap"] = gap;
  j["status"] = std::string(toString(status));
  j["nodes"] = nodes;
  j["build_s"] = build_seconds;
  j["solve_s"] = solve_seconds;
  j["wall_s"] = wall_seconds;
  j["peak_rss_kb"] = peak_rss_kb;
  j["config"] = ordered_json::parse(serializeRunConfig(config));
  return j.dump(2) + "\n";
}

namespace {

// Config checks that need the map. The image grid is checked for every
// method so a bad --grid2d never goes unnoticed.
void validateAgainst(const Map& map, const RunConfig& config) {
  config.validate();
  validateGrid(config.grid2d, map);
}

}  // namespace

SparsificationProblem buildConfiguredProblem(const Map& map, const RunConfig& config,
                                             BuildReport* report) {
  validateAgainst(map, config);
  return buildProblem(map, config.methodParams(), report);
}

SparsifyResult runSparsify(const Map& map, const RunConfig& config) {
  validateAgainst(map, config);
  const auto t0 = Clock::now();
  SolveLog log;
  log.method = config.method;
  log.mode = config.mode;
  log.landmarks = map.numLandmarks();
  log.keyframes = map.numKeyframes();

  const MethodParams params = config.methodParams();
  BuildReport build;
  SparsificationProblem problem = buildProblem(map, params, &build);
  log.valid_cells = build.valid_cells;
  for (const auto& b : problem.blocks) {
    log.blocks.push_back({b.name, b.matrix.rows(), b.matrix.nnz()});
  }
  log.build_seconds = secondsSince(t0);

  const auto t1 = Clock::now();
  Solution sol;
  if (config.method == Method::kGreedy) {
    sol = greedyKCover(map, params);
  } else if (config.mode == SolveMode::kExact) {
    sol = solveBnb(problem, config.limits);
  } else {
    sol = roundRelaxation(problem, solveLpRelaxation(problem, config.limits.lp));
  }
  log.solve_seconds = secondsSince(t1);

  for (std::uint8_t v : sol.x) log.selected += v;
  log.objective = sol.objective;
  log.bound = sol.bound;
  log.gap = sol.gap;
  log.status = sol.status;
  log.nodes = sol.nodes;

  Map::Metadata meta = map.metadata();
  meta["method"] = std::string(toString(config.method));
  meta["run_config"] = serializeRunConfig(config);
  meta["status"] = std::string(toString(sol.status));
  meta["objective"] = detail::formatDouble(sol.objective);
  Map compact = map.subset(sol.x, std::move(meta));

  log.wall_seconds = secondsSince(t0);
  log.peak_rss_kb = peakRssKb();
  return SparsifyResult{std::move(sol), std::move(compact), std::move(log)};
}

std::vector<QueryStratum> parseStrataList(std::string_view s) {
  std::vector<QueryStratum> out;
  for (const auto& name : splitList(s, ',')) {
    if (!name.empty()) out.push_back(parseQueryStratum(name));
  }
  if (out.empty()) throw ConfigError("empty stratum list");
  return out;
}

std::vector<QueryView> configuredQueries(const Map& map, const RunConfig& config) {
  if (!config.queries_in.empty()) return loadQueries(config.queries_in, map);
  std::vector<QueryView> out;
  for (QueryStratum s : config.eval.strata) {
    auto part = generateQueries(map, s, config.eval.queries_per_stratum, config.seed);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<CsvRow> runEval(const Map& original, std::span<const EvalInput> inputs,
                            std::span<const QueryView> queries, const RunConfig& config) {
  config.validate();
  const int workers = config.limits.workers;
  const RegionSet regions = fitAllVisibility(original, {}, workers);
  std::optional<Grid3DConfig> grid;
  if (config.grid3d_res) {
    grid = resolveGrid3D(original, regions, Grid3DParams{*config.grid3d_res, config.bounds});
  }
  std::vector<CsvRow> rows;
  for (const auto& in : inputs) {
    const auto selected = selectionFromCompact(original, *in.compact);
    const EvalReport rep =
        localizationRate(original, regions, selected, queries, config.eval.threshold, workers);
    const CompressionReport comp = compressionReport(selected);
    std::optional<std::size_t> cells;
    if (grid) cells = countValidCells(original, regions, selected, *grid, config.k2, workers);
    for (const auto& s : rep.strata) {
      rows.push_back(CsvRow{in.method, std::string(toString(s.stratum)), s.total, s.localized,
                            s.rate, comp.ratio, cells});
    }
  }
  return rows;
}

std::vector<BenchRow> runBench(std::span<const BenchScene> scenes,
                               std::span<const Method> methods, const RunConfig& config) {
  std::vector<BenchRow> rows;
  for (const auto& scene : scenes) {
    const Map map = generateMap(scene.spec);
    for (Method m : methods) {
      RunConfig c = config;
      c.method = m;
      rows.push_back(BenchRow{scene.name, runSparsify(map, c).log});
    }
  }
  return rows;
}

std::string formatBenchCsv(std::span<const BenchRow> rows, std::string_view comment) {
  std::string out;
  std::istringstream lines{std::string(comment)};
  for (std::string line; std::getline(lines, line);) out += "# " + line + "\n";
  out += kBenchHeader;
  out += '\n';
  for (const auto& r : rows) {
    const SolveLog& l = r.log;
    std::size_t nrows = 0, nnz = 0;
    for (const auto& b : l.blocks) {
      nrows += b.rows;
      nnz += b.nonzeros;
    }
    out += r.scene + ',' + std::string(toString(l.method)) + ',' +
           std::string(toString(l.mode)) + ',' + std::to_string(l.landmarks) + ',' +
           std::to_string(l.keyframes) + ',' + std::to_string(l.valid_cells) + ',' +
           std::to_string(nrows) + ',' + std::to_string(nnz) + ',' +
           std::to_string(l.selected) + ',';
    for (double v : {l.objective, l.bound, l.gap}) {
      detail::appendDouble(out, v);
      out += ',';
    }
    out += std::string(toString(l.status)) + ',';
    for (double v : {l.build_seconds, l.solve_seconds, l.wall_seconds}) {
      detail::appendDouble(out, v);
      out += ',';
    }
    out += std::to_string(l.peak_rss_kb) + '\n';
  }
  return out;
}

std::size_t peakRssKb() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
  return static_cast<std::size_t>(usage.ru_maxrss);
}

}  // namespace mapsparse
