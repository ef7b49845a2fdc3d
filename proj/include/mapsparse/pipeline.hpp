#pragma once

#include <cstdint>
#include <filesystem>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mapsparse/eval.hpp"
#include "mapsparse/map_model.hpp"
#include "mapsparse/problem.hpp"
#include "mapsparse/solver.hpp"
#include "mapsparse/synth.hpp"

namespace mapsparse {

enum class Method { kLP, kOurs2D, kOurs3D, kDI, kGreedy };
std::string_view toString(Method m);
Method parseMethod(std::string_view s);  // lp | ours2d | ours3d | di | greedy

enum class SolveMode { kExact, kHeuristic };
std::string_view toString(SolveMode m);
SolveMode parseSolveMode(std::string_view s);  // exact | heuristic

struct EvalParams {
  int threshold = 15;  // T
  std::vector<QueryStratum> strata{std::begin(kAllStrata), std::end(kAllStrata)};
  std::size_t queries_per_stratum = 300;
};

// Everything a run depends on. Serialized into every artifact it produces.
struct RunConfig {
  Method method = Method::kOurs2D;
  int k1 = 50;
  int k2 = 30;
  std::optional<double> lambda1;
  double lambda2 = 0.1;
  double lambda3 = 0.5;
  Grid2DConfig grid2d;
  std::optional<double> grid3d_res;
  std::optional<Box> bounds;  // empty: automatic
  WeightScheme weight_scheme = WeightScheme::kInverseMatch;

  SolveMode mode = SolveMode::kExact;
  SolveLimits limits;

  EvalParams eval;
  std::uint64_t seed = 1;

  std::filesystem::path map_in;
  std::filesystem::path queries_in;  // empty: generate from seed
  std::filesystem::path map_out;
  std::filesystem::path log_out;
  std::filesystem::path report_out;
  std::filesystem::path lp_out;

  // Throws ConfigError on inconsistent settings (e.g. ours3d without a 3D
  // grid resolution).
  void validate() const;
  MethodParams methodParams() const;
};

// JSON object; missing keys keep defaults, unknown keys are rejected.
RunConfig parseRunConfig(const std::string& json_text);
// Output paths are left out so artifacts of identical runs compare equal
// wherever they are written.
std::string serializeRunConfig(const RunConfig& config, bool include_output_paths = false);

struct BlockSize {
  std::string name;
  std::size_t rows = 0;
  std::size_t nonzeros = 0;
};

struct SolveLog {
  Method method = Method::kLP;
  SolveMode mode = SolveMode::kExact;
  std::size_t landmarks = 0;    // N
  std::size_t keyframes = 0;    // M
  std::size_t valid_cells = 0;  // S, Ours-3D only
  std::vector<BlockSize> blocks;
  std::size_t selected = 0;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  SolveStatus status = SolveStatus::kHeuristic;
  std::size_t nodes = 0;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
  double wall_seconds = 0.0;
  std::size_t peak_rss_kb = 0;

  std::string toJson(const RunConfig& config) const;
};

struct SparsifyResult {
  Solution solution;
  Map compact;
  SolveLog log;
};

// Builds the configured problem and solves it. The compact map keeps the
// input's keyframes, cameras and ids; its metadata records the method and
// the serialized RunConfig.
SparsifyResult runSparsify(const Map& map, const RunConfig& config);

// Builds the configured problem without solving (for LP export).
SparsificationProblem buildConfiguredProblem(const Map& map, const RunConfig& config,
                                             BuildReport* report = nullptr);

struct EvalInput {
  std::string method;  // CSV label
  const Map* compact = nullptr;
};

// One CSV row per (input, stratum present in the queries).
std::vector<CsvRow> runEval(const Map& original, std::span<const EvalInput> inputs,
                            std::span<const QueryView> queries, const RunConfig& config);

// Comma-separated stratum names, e.g. "on-trajectory,offset".
std::vector<QueryStratum> parseStrataList(std::string_view s);

// Queries from config.queries_in when set, else generated per stratum.
std::vector<QueryView> configuredQueries(const Map& map, const RunConfig& config);

struct BenchScene {
  std::string name;
  SceneSpec spec;
};

struct BenchRow {
  std::string scene;
  SolveLog log;
};

inline constexpr std::string_view kBenchHeader =
    "scene,method,mode,n,m,s,rows,nonzeros,selected,objective,bound,gap,status,"
    "build_s,solve_s,wall_s,peak_rss_kb";

std::vector<BenchRow> runBench(std::span<const BenchScene> scenes,
                               std::span<const Method> methods, const RunConfig& config);
std::string formatBenchCsv(std::span<const BenchRow> rows, std::string_view comment);

// Process-wide peak resident set size in KiB (0 where unsupported).
std::size_t peakRssKb();

}  // namespace mapsparse
