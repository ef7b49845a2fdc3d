// Command-line driver. Talks to the library only through the C interface.
//
// Exit codes: 0 success, 2 usage, 3 input (including unreadable or
// unwritable files), 4 solver failure, 1 unexpected internal error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mapsparse/mapsparse.h"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitSolver = 4;
constexpr int kExitInternal = 1;

// Raised inside a subcommand; carries the exit code.
struct Failure {
  int code;
  std::string message;
};

int exitCodeOf(ms_status s) {
  switch (s) {
    case MS_OK: return 0;
    case MS_ERR_USAGE: return kExitUsage;
    case MS_ERR_INPUT:
    case MS_ERR_IO: return kExitInput;
    case MS_ERR_SOLVER: return kExitSolver;
    case MS_ERR_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

void check(ms_status s) {
  if (s != MS_OK) throw Failure{exitCodeOf(s), ms_last_error()};
}

struct MapDeleter {
  void operator()(ms_map* m) const { ms_map_free(m); }
};
struct ResultDeleter {
  void operator()(ms_result* r) const { ms_result_free(r); }
};
using MapHandle = std::unique_ptr<ms_map, MapDeleter>;
using ResultHandle = std::unique_ptr<ms_result, ResultDeleter>;

// Owns a string allocated by the library.
class LibString {
 public:
  LibString() = default;
  ~LibString() { ms_string_free(ptr_); }
  LibString(const LibString&) = delete;
  LibString& operator=(const LibString&) = delete;
  char** out() { return &ptr_; }
  std::string str() const { return ptr_ ? ptr_ : ""; }

 private:
  char* ptr_ = nullptr;
};

MapHandle loadMap(const std::string& path) {
  ms_map* m = nullptr;
  check(ms_map_load(path.c_str(), &m));
  return MapHandle(m);
}

std::string readFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Failure{kExitInput, "cannot open '" + path + "'"};
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Failure{kExitInput, "cannot open '" + path + "' for writing"};
  f << text;
  if (!f) throw Failure{kExitInput, "failed writing '" + path + "'"};
}

// Run settings shared by every subcommand: values from --config first, then
// any flag given on the command line.
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {
    app->add_option("--config", config_path_, "INI file with run settings (flags override it)");
  }

  // Registers --<flag> as an override for config key `key`.
  CLI::Option* add(const std::string& flag, const std::string& key, const std::string& help) {
    auto& slot = values_[key];
    CLI::Option* opt = app_->add_option(flag, slot, help);
    flags_.emplace_back(opt, key);
    return opt;
  }

  json resolve() const {
    json cfg = json::object();
    if (!config_path_.empty()) {
      if (!std::filesystem::exists(config_path_)) {
        throw Failure{kExitInput, "config file '" + config_path_ + "' not found"};
      }
      std::vector<CLI::ConfigItem> items;
      try {
        items = CLI::ConfigINI().from_file(config_path_);
      } catch (const CLI::Error& e) {
        throw Failure{kExitUsage, std::string("config file: ") + e.what()};
      }
      for (const auto& item : items) {
        // Section headers are accepted for grouping and ignored.
        if (item.name == "++" || item.name == "--" || item.inputs.empty()) continue;
        std::string key = item.name;
        std::replace(key.begin(), key.end(), '-', '_');
        std::string value = item.inputs.front();
        for (std::size_t i = 1; i < item.inputs.size(); ++i) value += "," + item.inputs[i];
        cfg[key] = value;
      }
    }
    for (const auto& [opt, key] : flags_) {
      if (opt->count() > 0) cfg[key] = values_.at(key);
    }
    return cfg;
  }

  static std::string get(const json& cfg, const std::string& key) {
    auto it = cfg.find(key);
    return it == cfg.end() ? std::string() : it->get<std::string>();
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, std::string> values_;
  std::vector<std::pair<CLI::Option*, std::string>> flags_;
};

void addProblemFlags(Settings& s) {
  s.add("--method", "method", "lp | ours2d | ours3d | di | greedy");
  s.add("--k1", "k1", "keyframe cover threshold K1 (default 50)");
  s.add("--k2", "k2", "valid 3D cell threshold K2 (default 30)");
  s.add("--lambda1", "lambda1", "keyframe slack penalty (default 1.0, DI 0.02)");
  s.add("--lambda2", "lambda2", "2D cell slack penalty (default 0.1)");
  s.add("--lambda3", "lambda3", "3D cell slack penalty (default 0.5)");
  s.add("--grid2d", "grid2d", "image grid COLSxROWS (default 8x6)");
  s.add("--grid3d-res", "grid3d_res", "3D grid resolution in meters (required for ours3d)");
  s.add("--bounds", "bounds", "3D grid box: auto | x0,y0,z0,x1,y1,z1");
  s.add("--weight-scheme", "weight_scheme", "inverse-match | uniform");
}

void addSolverFlags(Settings& s) {
  s.add("--mode", "mode", "exact (branch-and-bound) | heuristic (relaxation + rounding)");
  s.add("--time-limit", "time_limit", "seconds, or inf");
  s.add("--gap", "gap", "relative gap limit (default 1e-6)");
  s.add("--node-limit", "node_limit", "branch-and-bound node limit, or inf");
  s.add("--workers", "workers", "worker threads (default 1)");
  s.add("--lp-engine", "lp_engine", "auto | simplex | pdhg");
  s.add("--lp-tolerance", "lp_tolerance", "first-order LP gap target");
  s.add("--lp-max-iterations", "lp_max_iterations", "first-order LP iteration cap");
}

void addEvalFlags(Settings& s) {
  s.add("--threshold", "threshold", "matched-landmark threshold T (default 15)");
  s.add("--strata", "strata", "comma list of on-trajectory, offset, free-space");
  s.add("--queries-per-stratum", "queries_per_stratum", "generated queries per stratum");
  s.add("--queries", "queries", "query-set JSON file (generated when absent)");
}

std::string require(const json& cfg, const std::string& key, const std::string& flag) {
  const std::string v = Settings::get(cfg, key);
  if (v.empty()) throw Failure{kExitUsage, flag + " is required"};
  return v;
}

// --- subcommands ----------------------------------------------------------

void cmdSynth(const std::string& spec_path, const json& cfg) {
  const std::string out = require(cfg, "out", "--out");
  const std::string spec = spec_path.empty() ? std::string() : readFile(spec_path);
  const std::string seed = Settings::get(cfg, "seed");
  std::uint64_t seed_value = 1;
  if (seed.empty() && !spec.empty()) {
    const json j = json::parse(spec, nullptr, false);
    if (j.is_object() && j.contains("seed") && j["seed"].is_number_unsigned()) {
      seed_value = j["seed"].get<std::uint64_t>();
    }
  }
  if (!seed.empty()) {
    try {
      seed_value = std::stoull(seed);
    } catch (const std::exception&) {
      throw Failure{kExitUsage, "--seed: expected a non-negative integer"};
    }
  }
  ms_map* raw = nullptr;
  check(ms_synth_generate(spec.c_str(), seed.empty() ? 0 : 1, seed_value, &raw));
  MapHandle map(raw);
  check(ms_map_save(map.get(), out.c_str()));
  std::size_t n = 0, m = 0, obs = 0;
  check(ms_map_info(map.get(), &n, &m, &obs));
  std::cout << "wrote " << out << ": " << n << " landmarks, " << m << " keyframes, " << obs
            << " observations\n";

  const std::string queries = Settings::get(cfg, "queries");
  if (!queries.empty()) {
    std::string strata = Settings::get(cfg, "strata");
    if (strata.empty()) strata = "on-trajectory,offset,free-space";
    const std::string per = Settings::get(cfg, "queries_per_stratum");
    const std::size_t count = per.empty() ? 300 : std::stoul(per);
    check(ms_synth_queries(map.get(), strata.c_str(), count, seed_value, queries.c_str()));
    std::cout << "wrote " << queries << "\n";
  }
}

// Keys the library config accepts; CLI-only keys are stripped before the call.
json libraryConfig(json cfg) {
  for (const char* k : {"spec", "compact", "methods", "scene"}) cfg.erase(k);
  return cfg;
}

void cmdSparsify(const json& cfg) {
  const std::string map_path = require(cfg, "map", "--map");
  const std::string out = require(cfg, "out", "--out");
  MapHandle map = loadMap(map_path);
  const std::string config = libraryConfig(cfg).dump();

  const std::string lp_path = Settings::get(cfg, "export_lp");
  if (!lp_path.empty()) check(ms_export_lp(map.get(), config.c_str(), lp_path.c_str()));

  ms_result* raw = nullptr;
  check(ms_sparsify(map.get(), config.c_str(), &raw));
  ResultHandle result(raw);
  ms_map* compact_raw = nullptr;
  check(ms_result_compact(result.get(), &compact_raw));
  MapHandle compact(compact_raw);
  check(ms_map_save(compact.get(), out.c_str()));

  LibString log;
  check(ms_result_log(result.get(), log.out()));
  const std::string log_path = Settings::get(cfg, "log");
  if (!log_path.empty()) writeFile(log_path, log.str());

  const json j = json::parse(log.str());
  std::cout << "method=" << j["method"].get<std::string>()
            << " status=" << j["status"].get<std::string>()
            << " selected=" << j["selected"] << "/" << j["n"] << " keyframes=" << j["m"]
            << " valid_cells=" << j["s"] << " objective=" << j["objective"]
            << " bound=" << j["bound"] << " gap=" << j["gap"] << " wall_s=" << j["wall_s"]
            << "\n";
}

void cmdEval(const json& cfg, const std::vector<std::string>& compacts) {
  const std::string map_path = require(cfg, "map", "--map");
  if (compacts.empty()) throw Failure{kExitUsage, "at least one --compact is required"};
  MapHandle original = loadMap(map_path);
  std::vector<MapHandle> maps;
  std::vector<std::string> labels;
  for (const auto& spec : compacts) {
    const auto eq = spec.find('=');
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    labels.push_back(eq == std::string::npos ? std::filesystem::path(path).stem().string()
                                             : spec.substr(0, eq));
    maps.push_back(loadMap(path));
  }
  std::vector<const ms_map*> map_ptrs;
  std::vector<const char*> label_ptrs;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    map_ptrs.push_back(maps[i].get());
    label_ptrs.push_back(labels[i].c_str());
  }
  const std::string config = libraryConfig(cfg).dump();
  LibString csv;
  check(ms_eval(original.get(), map_ptrs.data(), label_ptrs.data(), maps.size(),
                config.c_str(), csv.out()));
  const std::string report = Settings::get(cfg, "report");
  if (!report.empty()) writeFile(report, csv.str());

  // Summary: one line per data row.
  std::istringstream lines(csv.str());
  bool header_seen = false;
  for (std::string line; std::getline(lines, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() < 6) continue;
    std::cout << f[0] << " " << f[1] << ": " << f[3] << "/" << f[2] << " localized (rate "
              << f[4] << "), ratio " << f[5];
    if (f.size() > 6 && !f[6].empty()) std::cout << ", valid cells " << f[6];
    std::cout << "\n";
  }
  if (report.empty()) std::cout << csv.str();
}

void cmdBench(const json& cfg, const std::vector<std::string>& scene_paths,
              const std::string& methods) {
  if (scene_paths.empty()) throw Failure{kExitUsage, "at least one --scene is required"};
  std::vector<std::string> specs, names;
  for (const auto& p : scene_paths) {
    specs.push_back(readFile(p));
    names.push_back(std::filesystem::path(p).stem().string());
  }
  std::vector<const char*> spec_ptrs, name_ptrs;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    spec_ptrs.push_back(specs[i].c_str());
    name_ptrs.push_back(names[i].c_str());
  }
  const std::string config = libraryConfig(cfg).dump();
  LibString csv;
  check(ms_bench(spec_ptrs.data(), name_ptrs.data(), specs.size(), methods.c_str(),
                 config.c_str(), csv.out()));
  const std::string report = Settings::get(cfg, "report");
  if (!report.empty()) writeFile(report, csv.str());
  std::cout << csv.str();
}

void cmdExportLp(const json& cfg) {
  const std::string map_path = require(cfg, "map", "--map");
  const std::string out = require(cfg, "out", "--out");
  MapHandle map = loadMap(map_path);
  check(ms_export_lp(map.get(), libraryConfig(cfg).dump().c_str(), out.c_str()));
  std::cout << "wrote " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landmark map sparsification: build, solve and evaluate compact maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ms_version()));

  auto* synth = app.add_subcommand("synth", "generate a synthetic map");
  Settings synth_s(synth);
  std::string spec_path;
  synth->add_option("--spec", spec_path, "scene spec JSON (defaults when absent)")
      ->check(CLI::ExistingFile);
  synth_s.add("--seed", "seed", "overrides the spec's seed");
  synth_s.add("--out", "out", "output map JSON");
  synth_s.add("--queries", "queries", "also write a query set to this file");
  synth_s.add("--strata", "strata", "strata for --queries");
  synth_s.add("--queries-per-stratum", "queries_per_stratum", "queries per stratum");

  auto* sparsify = app.add_subcommand("sparsify", "select a compact landmark subset");
  sparsify->alias("solve");
  Settings sparsify_s(sparsify);
  sparsify_s.add("--map", "map", "input map JSON");
  sparsify_s.add("--out", "out", "compact map JSON");
  sparsify_s.add("--log", "log", "solve log JSON");
  sparsify_s.add("--export-lp", "export_lp", "also write the MILP in LP format");
  sparsify_s.add("--seed", "seed", "recorded in the artifacts");
  addProblemFlags(sparsify_s);
  addSolverFlags(sparsify_s);

  auto* eval = app.add_subcommand("eval", "localization report for compact maps");
  Settings eval_s(eval);
  std::vector<std::string> compacts;
  eval_s.add("--map", "map", "original map JSON");
  eval->add_option("--compact", compacts, "compact map, optionally LABEL=PATH (repeatable)");
  eval_s.add("--report", "report", "CSV output (stdout when absent)");
  eval_s.add("--seed", "seed", "query generation seed");
  eval_s.add("--grid3d-res", "grid3d_res", "also count valid 3D cells at this resolution");
  eval_s.add("--k2", "k2", "valid 3D cell threshold");
  eval_s.add("--bounds", "bounds", "3D grid box: auto | x0,y0,z0,x1,y1,z1");
  eval_s.add("--workers", "workers", "worker threads");
  addEvalFlags(eval_s);

  auto* bench = app.add_subcommand("bench", "time methods over scene specs");
  Settings bench_s(bench);
  std::vector<std::string> scenes;
  std::string methods = "lp,ours2d";
  bench->add_option("--scene", scenes, "scene spec JSON (repeatable)")->check(CLI::ExistingFile);
  bench->add_option("--methods", methods, "comma list of methods")->capture_default_str();
  bench_s.add("--report", "report", "CSV output");
  bench_s.add("--seed", "seed", "recorded in the report");
  addProblemFlags(bench_s);
  addSolverFlags(bench_s);

  auto* export_lp = app.add_subcommand("export-lp", "write the MILP in CPLEX LP format");
  Settings export_s(export_lp);
  export_s.add("--map", "map", "input map JSON");
  export_s.add("--out", "out", "LP file");
  export_s.add("--seed", "seed", "recorded in the file header");
  addProblemFlags(export_s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      cmdSynth(spec_path, synth_s.resolve());
    } else if (sparsify->parsed()) {
      cmdSparsify(sparsify_s.resolve());
    } else if (eval->parsed()) {
      cmdEval(eval_s.resolve(), compacts);
    } else if (bench->parsed()) {
      cmdBench(bench_s.resolve(), scenes, methods);
    } else if (export_lp->parsed()) {
      cmdExportLp(export_s.resolve());
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
