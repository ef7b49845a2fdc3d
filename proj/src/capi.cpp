#include "mapsparse/mapsparse.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "mapsparse/error.hpp"
#include "mapsparse/pipeline.hpp"
#include "mapsparse/synth.hpp"

struct ms_map {
  mapsparse::Map map;
};

struct ms_result {
  mapsparse::SparsifyResult result;
  mapsparse::RunConfig config;
  std::string status;
};

namespace {

using namespace mapsparse;

thread_local std::string last_error;

ms_status fail(ms_status code, const char* what) {
  last_error = what;
  return code;
}

ms_status statusOf(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return MS_ERR_USAGE;
    case ErrorKind::kInput: return MS_ERR_INPUT;
    case ErrorKind::kSolver: return MS_ERR_SOLVER;
    case ErrorKind::kIo: return MS_ERR_IO;
    case ErrorKind::kInternal: return MS_ERR_INTERNAL;
  }
  return MS_ERR_INTERNAL;
}

// Runs `body` and converts any exception into a status plus message.
template <class F>
ms_status guarded(F&& body) {
  try {
    body();
    return MS_OK;
  } catch (const Error& e) {
    return fail(statusOf(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MS_ERR_INTERNAL, "unknown exception");
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw ContractViolation(std::string(name) + " must not be NULL");
}

char* copyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

RunConfig configFrom(const char* json_text) {
  RunConfig c;
  if (json_text != nullptr && *json_text != '\0') c = parseRunConfig(json_text);
  c.validate();
  return c;
}

std::string reportComment(const RunConfig& c) {
  return "run_config " + serializeRunConfig(c) + "\nseed " + std::to_string(c.seed);
}

}  // namespace

extern "C" {

const char* ms_version(void) { return "1.0.0"; }

const char* ms_last_error(void) { return last_error.c_str(); }

void ms_string_free(char* s) { std::free(s); }

ms_status ms_map_load(const char* path, ms_map** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ms_map{loadMap(path)};
  });
}

ms_status ms_map_parse(const char* json_text, ms_map** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new ms_map{parseMap(json_text)};
  });
}

ms_status ms_map_save(const ms_map* map, const char* path) {
  return guarded([&] {
    require(map, "map");
    require(path, "path");
    saveMap(map->map, path);
  });
}

ms_status ms_map_serialize(const ms_map* map, char** out) {
  return guarded([&] {
    require(map, "map");
    require(out, "out");
    *out = copyString(serializeMap(map->map));
  });
}

ms_status ms_map_info(const ms_map* map, size_t* landmarks, size_t* keyframes,
                      size_t* observations) {
  return guarded([&] {
    require(map, "map");
    if (landmarks) *landmarks = map->map.numLandmarks();
    if (keyframes) *keyframes = map->map.numKeyframes();
    if (observations) *observations = map->map.numObservations();
  });
}

void ms_map_free(ms_map* map) { delete map; }

ms_status ms_synth_generate(const char* spec_json, int override_seed, uint64_t seed,
                            ms_map** out) {
  return guarded([&] {
    require(out, "out");
    SceneSpec spec;
    if (spec_json != nullptr && *spec_json != '\0') spec = parseSceneSpec(spec_json);
    if (override_seed) spec.seed = seed;
    *out = new ms_map{generateMap(spec)};
  });
}

ms_status ms_synth_queries(const ms_map* map, const char* strata, size_t count_per_stratum,
                           uint64_t seed, const char* path) {
  return guarded([&] {
    require(map, "map");
    require(strata, "strata");
    require(path, "path");
    std::vector<QueryView> queries;
    for (QueryStratum s : parseStrataList(strata)) {
      auto part = generateQueries(map->map, s, count_per_stratum, seed);
      queries.insert(queries.end(), part.begin(), part.end());
    }
    saveQueries(queries, path);
  });
}

ms_status ms_sparsify(const ms_map* map, const char* config_json, ms_result** out) {
  return guarded([&] {
    require(map, "map");
    require(out, "out");
    const RunConfig c = configFrom(config_json);
    SparsifyResult r = runSparsify(map->map, c);
    std::string status(toString(r.solution.status));
    *out = new ms_result{std::move(r), c, std::move(status)};
  });
}

ms_status ms_result_compact(const ms_result* result, ms_map** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    *out = new ms_map{result->result.compact};
  });
}

ms_status ms_result_log(const ms_result* result, char** out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    *out = copyString(result->result.log.toJson(result->config));
  });
}

ms_status ms_result_summary(const ms_result* result, double* objective, double* bound,
                            double* gap, size_t* selected) {
  return guarded([&] {
    require(result, "result");
    const auto& r = result->result;
    if (objective) *objective = r.solution.objective;
    if (bound) *bound = r.solution.bound;
    if (gap) *gap = r.solution.gap;
    if (selected) *selected = r.log.selected;
  });
}

const char* ms_result_status(const ms_result* result) {
  return result == nullptr ? "" : result->status.c_str();
}

ms_status ms_result_selection(const ms_result* result, uint8_t* buffer, size_t length) {
  return guarded([&] {
    require(result, "result");
    require(buffer, "buffer");
    const auto& x = result->result.solution.x;
    if (length != x.size()) {
      throw ContractViolation("selection buffer holds " + std::to_string(length) +
                              " bytes, map has " + std::to_string(x.size()) + " landmarks");
    }
    std::memcpy(buffer, x.data(), x.size());
  });
}

void ms_result_free(ms_result* result) { delete result; }

ms_status ms_export_lp(const ms_map* map, const char* config_json, const char* path) {
  return guarded([&] {
    require(map, "map");
    require(path, "path");
    const RunConfig c = configFrom(config_json);
    if (c.method == Method::kGreedy) {
      throw ConfigError("method greedy has no MILP to export");
    }
    exportLp(buildConfiguredProblem(map->map, c), path, reportComment(c));
  });
}

ms_status ms_eval(const ms_map* original, const ms_map* const* compacts,
                  const char* const* labels, size_t count, const char* config_json,
                  char** csv_out) {
  return guarded([&] {
    require(original, "original");
    require(csv_out, "csv_out");
    if (count > 0) {
      require(compacts, "compacts");
      require(labels, "labels");
    }
    const RunConfig c = configFrom(config_json);
    std::vector<EvalInput> inputs;
    for (size_t i = 0; i < count; ++i) {
      require(compacts[i], "compacts[i]");
      require(labels[i], "labels[i]");
      inputs.push_back(EvalInput{labels[i], &compacts[i]->map});
    }
    const auto queries = configuredQueries(original->map, c);
    const auto rows = runEval(original->map, inputs, queries, c);
    *csv_out = copyString(formatCsv(rows, reportComment(c)));
  });
}

ms_status ms_bench(const char* const* scene_specs, const char* const* scene_names,
                   size_t scene_count, const char* methods, const char* config_json,
                   char** csv_out) {
  return guarded([&] {
    require(methods, "methods");
    require(csv_out, "csv_out");
    if (scene_count > 0) {
      require(scene_specs, "scene_specs");
      require(scene_names, "scene_names");
    }
    const RunConfig c = configFrom(config_json);
    std::vector<BenchScene> scenes;
    for (size_t i = 0; i < scene_count; ++i) {
      require(scene_specs[i], "scene_specs[i]");
      require(scene_names[i], "scene_names[i]");
      scenes.push_back(BenchScene{scene_names[i], parseSceneSpec(scene_specs[i])});
    }
    std::vector<Method> ms;
    std::string cur;
    for (const char* p = methods;; ++p) {
      if (*p == ',' || *p == '\0') {
        if (!cur.empty()) ms.push_back(parseMethod(cur));
        cur.clear();
        if (*p == '\0') break;
      } else if (*p != ' ') {
        cur += *p;
      }
    }
    if (ms.empty()) throw ConfigError("no methods given");
    for (Method m : ms) {
      RunConfig probe = c;
      probe.method = m;
      probe.validate();
    }
    const auto rows = runBench(scenes, ms, c);
    *csv_out = copyString(formatBenchCsv(rows, reportComment(c)));
  });
}

ms_status ms_config_normalize(const char* config_json, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = copyString(serializeRunConfig(configFrom(config_json), true));
  });
}

}  // extern "C"
