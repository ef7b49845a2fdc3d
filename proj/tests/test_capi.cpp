// Exercises the shared library through its C header only.
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "mapsparse/mapsparse.h"

namespace {

struct MapDeleter {
  void operator()(ms_map* m) const { ms_map_free(m); }
};
struct ResultDeleter {
  void operator()(ms_result* r) const { ms_result_free(r); }
};
using MapPtr = std::unique_ptr<ms_map, MapDeleter>;
using ResultPtr = std::unique_ptr<ms_result, ResultDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  ms_string_free(s);
  return out;
}

const char* kSmallSpec = R"({"n_landmarks": 400, "n_keyframes": 12, "seed": 3})";
const char* kConfig = R"({"method": "ours2d", "k1": 15, "grid2d": "4x3", "mode": "heuristic"})";

MapPtr synth(const char* spec = kSmallSpec) {
  ms_map* raw = nullptr;
  REQUIRE(ms_synth_generate(spec, 0, 0, &raw) == MS_OK);
  return MapPtr(raw);
}

std::filesystem::path tempPath(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("version string and error reporting") {
  CHECK(std::strlen(ms_version()) > 0);
  ms_map* raw = nullptr;
  CHECK(ms_map_parse("{not json", &raw) == MS_ERR_INPUT);
  CHECK(raw == nullptr);
  CHECK(std::string(ms_last_error()).find("JSON") != std::string::npos);
  CHECK(ms_map_load("/nonexistent/map.json", &raw) == MS_ERR_IO);
  CHECK(ms_map_parse(nullptr, &raw) == MS_ERR_USAGE);
}

TEST_CASE("synth, info, serialize and reload") {
  auto map = synth();
  size_t n = 0, m = 0, obs = 0;
  REQUIRE(ms_map_info(map.get(), &n, &m, &obs) == MS_OK);
  CHECK(n == 400);
  CHECK(m == 12);
  CHECK(obs > 0);

  char* text = nullptr;
  REQUIRE(ms_map_serialize(map.get(), &text) == MS_OK);
  const std::string json = take(text);
  ms_map* back = nullptr;
  REQUIRE(ms_map_parse(json.c_str(), &back) == MS_OK);
  MapPtr reloaded(back);
  REQUIRE(ms_map_serialize(reloaded.get(), &text) == MS_OK);
  CHECK(take(text) == json);

  const auto path = tempPath("mapsparse_capi_map.json");
  REQUIRE(ms_map_save(map.get(), path.c_str()) == MS_OK);
  ms_map* loaded = nullptr;
  REQUIRE(ms_map_load(path.c_str(), &loaded) == MS_OK);
  ms_map_free(loaded);
  std::filesystem::remove(path);

  // Seed override changes the scene.
  ms_map* other = nullptr;
  REQUIRE(ms_synth_generate(kSmallSpec, 1, 4, &other) == MS_OK);
  MapPtr other_map(other);
  REQUIRE(ms_map_serialize(other_map.get(), &text) == MS_OK);
  CHECK(take(text) != json);
  CHECK(ms_synth_generate(R"({"n_landmarks": 0})", 0, 0, &other) == MS_ERR_USAGE);
}

TEST_CASE("sparsify result accessors") {
  auto map = synth();
  ms_result* raw = nullptr;
  REQUIRE(ms_sparsify(map.get(), kConfig, &raw) == MS_OK);
  ResultPtr result(raw);

  double objective = 0, bound = 0, gap = 0;
  size_t selected = 0;
  REQUIRE(ms_result_summary(result.get(), &objective, &bound, &gap, &selected) == MS_OK);
  CHECK(selected > 0);
  CHECK(bound <= objective + 1e-9);
  CHECK(std::string(ms_result_status(result.get())) == "heuristic");

  std::vector<uint8_t> x(400);
  REQUIRE(ms_result_selection(result.get(), x.data(), x.size()) == MS_OK);
  size_t ones = 0;
  for (auto v : x) ones += v;
  CHECK(ones == selected);
  CHECK(ms_result_selection(result.get(), x.data(), 3) == MS_ERR_USAGE);

  ms_map* compact_raw = nullptr;
  REQUIRE(ms_result_compact(result.get(), &compact_raw) == MS_OK);
  MapPtr compact(compact_raw);
  size_t n = 0, m = 0, obs = 0;
  REQUIRE(ms_map_info(compact.get(), &n, &m, &obs) == MS_OK);
  CHECK(n == selected);
  CHECK(m == 12);

  char* log = nullptr;
  REQUIRE(ms_result_log(result.get(), &log) == MS_OK);
  const std::string log_text = take(log);
  CHECK(log_text.find("\"method\"") != std::string::npos);
  CHECK(log_text.find("\"config\"") != std::string::npos);

  CHECK(ms_sparsify(map.get(), R"({"method": "ours3d"})", &raw) == MS_ERR_USAGE);
  CHECK(std::string(ms_last_error()).find("grid3d") != std::string::npos);
  CHECK(ms_sparsify(map.get(), R"({"bogus": 1})", &raw) == MS_ERR_USAGE);
}

TEST_CASE("LP export, eval and bench") {
  auto map = synth();
  const auto lp_path = tempPath("mapsparse_capi.lp");
  REQUIRE(ms_export_lp(map.get(), kConfig, lp_path.c_str()) == MS_OK);
  std::ifstream lp(lp_path);
  std::string first;
  std::getline(lp, first);
  CHECK(first.rfind("\\ run_config", 0) == 0);
  std::filesystem::remove(lp_path);
  CHECK(ms_export_lp(map.get(), R"({"method": "greedy"})", lp_path.c_str()) == MS_ERR_USAGE);

  ms_result* raw = nullptr;
  REQUIRE(ms_sparsify(map.get(), kConfig, &raw) == MS_OK);
  ResultPtr result(raw);
  ms_map* compact_raw = nullptr;
  REQUIRE(ms_result_compact(result.get(), &compact_raw) == MS_OK);
  MapPtr compact(compact_raw);

  const ms_map* compacts[] = {compact.get()};
  const char* labels[] = {"ours2d"};
  char* csv = nullptr;
  REQUIRE(ms_eval(map.get(), compacts, labels, 1,
                  R"({"queries_per_stratum": 10, "strata": "on-trajectory,offset"})",
                  &csv) == MS_OK);
  const std::string report = take(csv);
  CHECK(report.find("method,stratum,total,localized,rate,ratio,valid_cells") !=
        std::string::npos);
  CHECK(report.find("ours2d,on-trajectory,10,") != std::string::npos);
  CHECK(report.find("ours2d,offset,10,") != std::string::npos);

  const char* specs[] = {kSmallSpec};
  const char* names[] = {"small"};
  REQUIRE(ms_bench(specs, names, 1, "lp,greedy", kConfig, &csv) == MS_OK);
  const std::string bench = take(csv);
  CHECK(bench.find("small,lp,") != std::string::npos);
  CHECK(bench.find("small,greedy,") != std::string::npos);
  CHECK(ms_bench(specs, names, 1, "lp,qp1", kConfig, &csv) == MS_ERR_USAGE);
}

TEST_CASE("config normalization fills defaults") {
  char* out = nullptr;
  REQUIRE(ms_config_normalize(R"({"k1": 20})", &out) == MS_OK);
  const std::string text = take(out);
  CHECK(text.find("\"k1\":20") != std::string::npos);
  CHECK(text.find("\"lambda2\"") != std::string::npos);
  CHECK(ms_config_normalize(R"({"k1": -1})", &out) == MS_ERR_USAGE);
}
