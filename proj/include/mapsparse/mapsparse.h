/* C interface to the mapsparse library.
 *
 * Handles are opaque and owned by the caller (free with the matching
 * *_free). Every function returning ms_status leaves a message retrievable
 * with ms_last_error() on failure; the message is thread-local and valid
 * until the next failing call on the same thread. Strings returned through
 * char** out-parameters are heap copies released with ms_string_free().
 *
 * Configuration is passed as a flat JSON object whose keys match the CLI
 * config file (method, k1, k2, lambda1..3, grid2d, grid3d_res, bounds,
 * weight_scheme, mode, time_limit, gap, node_limit, workers, lp_engine,
 * lp_tolerance, lp_max_iterations, threshold, strata, queries_per_stratum,
 * seed, map, queries). NULL or "" means all defaults.
 */
#ifndef MAPSPARSE_H
#define MAPSPARSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MS_API __declspec(dllexport)
#else
#define MS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ms_status {
  MS_OK = 0,
  MS_ERR_USAGE = 2,    /* bad configuration or argument */
  MS_ERR_INPUT = 3,    /* malformed or inconsistent input data */
  MS_ERR_SOLVER = 4,   /* numerical failure */
  MS_ERR_IO = 5,       /* file could not be read or written */
  MS_ERR_INTERNAL = 6  /* unexpected exception */
} ms_status;

typedef struct ms_map ms_map;
typedef struct ms_result ms_result;

MS_API const char* ms_version(void);
MS_API const char* ms_last_error(void);
MS_API void ms_string_free(char* s);

/* Maps */
MS_API ms_status ms_map_load(const char* path, ms_map** out);
MS_API ms_status ms_map_parse(const char* json_text, ms_map** out);
MS_API ms_status ms_map_save(const ms_map* map, const char* path);
MS_API ms_status ms_map_serialize(const ms_map* map, char** out);
MS_API ms_status ms_map_info(const ms_map* map, size_t* landmarks, size_t* keyframes,
                             size_t* observations);
MS_API void ms_map_free(ms_map* map);

/* Synthetic scenes. spec_json may be NULL for the default scene; when
 * override_seed is nonzero, seed replaces the spec's seed. */
MS_API ms_status ms_synth_generate(const char* spec_json, int override_seed, uint64_t seed,
                                   ms_map** out);
/* Writes a query-set JSON file for a comma-separated list of strata. */
MS_API ms_status ms_synth_queries(const ms_map* map, const char* strata, size_t count_per_stratum,
                                  uint64_t seed, const char* path);

/* Sparsification */
MS_API ms_status ms_sparsify(const ms_map* map, const char* config_json, ms_result** out);
/* New map handle holding the compact map. */
MS_API ms_status ms_result_compact(const ms_result* result, ms_map** out);
/* Solve log as JSON (method, sizes, objective, bound, gap, timings, config). */
MS_API ms_status ms_result_log(const ms_result* result, char** out);
MS_API ms_status ms_result_summary(const ms_result* result, double* objective, double* bound,
                                   double* gap, size_t* selected);
/* Solver status name: optimal, gap-limit, time-limit, node-limit, heuristic. */
MS_API const char* ms_result_status(const ms_result* result);
/* Copies the 0/1 selection (one byte per landmark of the input map). */
MS_API ms_status ms_result_selection(const ms_result* result, uint8_t* buffer, size_t length);
MS_API void ms_result_free(ms_result* result);

/* Writes the configured MILP in CPLEX LP format. */
MS_API ms_status ms_export_lp(const ms_map* map, const char* config_json, const char* path);

/* Localization CSV for each compact map against the original. Queries come
 * from the config's "queries" path or are generated from its seed. */
MS_API ms_status ms_eval(const ms_map* original, const ms_map* const* compacts,
                         const char* const* labels, size_t count, const char* config_json,
                         char** csv_out);

/* Timing CSV: every method in the comma-separated list on every scene. */
MS_API ms_status ms_bench(const char* const* scene_specs, const char* const* scene_names,
                          size_t scene_count, const char* methods, const char* config_json,
                          char** csv_out);

/* Validates a config and returns it normalized (all keys, defaults filled). */
MS_API ms_status ms_config_normalize(const char* config_json, char** out);

#ifdef __cplusplus
}
#endif

#endif /* MAPSPARSE_H */
