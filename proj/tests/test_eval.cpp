#include <doctest.h>

#include <random>

#include "mapsparse/error.hpp"
#include "mapsparse/eval.hpp"
#include "mapsparse/synth.hpp"

using namespace mapsparse;

namespace {

struct Scene {
  Map map;
  RegionSet regions;
  std::vector<QueryView> queries;
};

const Scene& scene() {
  static const Scene s = [] {
    SceneSpec spec;
    spec.n_landmarks = 1500;
    spec.n_keyframes = 30;
    spec.seed = 11;
    Scene out{generateMap(spec), {}, {}};
    out.regions = fitAllVisibility(out.map);
    for (QueryStratum st : kAllStrata) {
      auto q = generateQueries(out.map, st, 40, 5);
      out.queries.insert(out.queries.end(), q.begin(), q.end());
    }
    return out;
  }();
  return s;
}

std::vector<std::uint8_t> randomSelection(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<std::uint8_t> sel(n);
  for (auto& v : sel) v = coin(rng) ? 1 : 0;
  return sel;
}

}  // namespace

TEST_CASE("localize: query at a mapping keyframe sees its observations") {
  const auto& s = scene();
  const std::vector<std::uint8_t> all(s.map.numLandmarks(), 1);
  for (std::size_t k = 0; k < s.map.numKeyframes(); k += 7) {
    const auto& kf = s.map.keyframes()[k];
    const QueryView q{kf.pose, s.map.cameraOf(k), QueryStratum::kOnTrajectory};
    const auto r = localize(s.map, s.regions, all, q, 15);
    CHECK(r.matched >= s.map.observationsOfKeyframe(k).size());
    CHECK(r.success);
  }
}

TEST_CASE("localize: optical center outside every region matches nothing") {
  const auto& s = scene();
  const std::vector<std::uint8_t> all(s.map.numLandmarks(), 1);
  const QueryView far{Pose::lookAt({500, 500, 500}, {8, 6, 1.5}), s.map.cameras()[0],
                      QueryStratum::kFreeSpace};
  const auto r = localize(s.map, s.regions, all, far, 15);
  CHECK(r.matched == 0);
  CHECK_FALSE(r.success);
}

TEST_CASE("localize matches an independent recount") {
  const auto& s = scene();
  std::mt19937_64 rng(3);
  const auto sel = randomSelection(rng, s.map.numLandmarks(), 0.4);
  for (const auto& q : s.queries) {
    std::size_t expected = 0;
    const Eigen::Vector3d center = q.pose.opticalCenter();
    for (std::size_t j = 0; j < s.map.numLandmarks(); ++j) {
      const auto& p = s.map.landmarks()[j].position;
      if (sel[j] && project(q.camera, q.pose, p) && s.regions[j] &&
          isVisible(*s.regions[j], p, center)) {
        ++expected;
      }
    }
    const auto r = localize(s.map, s.regions, sel, q, 15);
    CHECK(r.matched == expected);
    CHECK(r.success == (expected >= 15));
    // Pure: a second call is identical.
    CHECK(localize(s.map, s.regions, sel, q, 15).matched == r.matched);
  }
}

TEST_CASE("localization rate: extremes, strata and errors") {
  const auto& s = scene();
  const std::size_t n = s.map.numLandmarks();
  const auto full = localizationRate(s.map, s.regions, std::vector<std::uint8_t>(n, 1),
                                     s.queries, 15, 3);
  const auto none = localizationRate(s.map, s.regions, std::vector<std::uint8_t>(n, 0),
                                     s.queries, 15);
  CHECK(none.rate == 0.0);
  CHECK(full.total == s.queries.size());
  CHECK(full.rate == doctest::Approx(static_cast<double>(full.localized) / full.total));
  REQUIRE(full.strata.size() == 3);
  std::size_t sum = 0;
  for (const auto& st : full.strata) {
    CHECK(st.total == 40);
    sum += st.localized;
  }
  CHECK(sum == full.localized);
  REQUIRE(full.stratum(QueryStratum::kOffset) != nullptr);
  CHECK_THROWS_AS(localizationRate(s.map, s.regions, std::vector<std::uint8_t>(n, 1),
                                   std::vector<QueryView>{}, 15),
                  ContractViolation);

  // Worker count does not change the result.
  const auto serial = localizationRate(s.map, s.regions, std::vector<std::uint8_t>(n, 1),
                                       s.queries, 15, 1);
  CHECK(serial.matched == full.matched);
}

TEST_CASE("adding landmarks never hurts") {
  const auto& s = scene();
  std::mt19937_64 rng(8);
  Grid3DConfig grid;
  grid.resolution = 1.0;
  grid.bounds = autoBounds(s.map, s.regions);
  for (int t = 0; t < 3; ++t) {
    auto small = randomSelection(rng, s.map.numLandmarks(), 0.3);
    auto large = small;
    for (auto& v : large) v = v || (rng() % 3 == 0);
    const auto a = localizationRate(s.map, s.regions, small, s.queries, 15);
    const auto b = localizationRate(s.map, s.regions, large, s.queries, 15);
    CHECK(b.rate >= a.rate);
    for (std::size_t i = 0; i < a.matched.size(); ++i) CHECK(b.matched[i] >= a.matched[i]);
    CHECK(countValidCells(s.map, s.regions, large, grid, 30) >=
          countValidCells(s.map, s.regions, small, grid, 30));
  }
}

TEST_CASE("valid cells of all and none") {
  const auto& s = scene();
  Grid3DConfig grid;
  grid.resolution = 1.0;
  grid.bounds = autoBounds(s.map, s.regions);
  const std::size_t n = s.map.numLandmarks();
  CHECK(countValidCells(s.map, s.regions, std::vector<std::uint8_t>(n, 1), grid, 30) ==
        validCells(s.map, s.regions, grid, 30).cells.size());
  CHECK(countValidCells(s.map, s.regions, std::vector<std::uint8_t>(n, 0), grid, 30) == 0);
}

TEST_CASE("compression ratio") {
  std::vector<std::uint8_t> sel(141673, 0);
  std::fill_n(sel.begin(), 5536, 1);
  const auto r = compressionReport(sel);
  CHECK(r.selected == 5536);
  CHECK(r.total == 141673);
  CHECK(r.ratio == doctest::Approx(0.0391).epsilon(1e-3));
  CHECK(compressionReport(std::vector<std::uint8_t>(10, 1)).ratio == 1.0);
  CHECK(compressionReport(std::vector<std::uint8_t>(10, 0)).ratio == 0.0);
}

TEST_CASE("selection from a compact map matches landmark ids") {
  const auto& s = scene();
  std::mt19937_64 rng(2);
  const auto sel = randomSelection(rng, s.map.numLandmarks(), 0.2);
  const Map compact = s.map.subset(sel, {});
  CHECK(selectionFromCompact(s.map, compact) == sel);

  const Map other = generateMap([] {
    SceneSpec spec;
    spec.n_landmarks = 40;
    spec.n_keyframes = 4;
    spec.min_observations = 5;
    spec.camera.id = 9;
    return spec;
  }());
  CHECK_THROWS_AS(selectionFromCompact(s.map, other), IntegrityError);
}

TEST_CASE("query sets round trip through JSON") {
  const auto& s = scene();
  const auto text = serializeQueries(s.queries);
  const auto back = parseQueries(text, s.map);
  REQUIRE(back.size() == s.queries.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK((back[i].label == s.queries[i].label));
    CHECK((back[i].pose.opticalCenter() - s.queries[i].pose.opticalCenter()).norm() < 1e-9);
  }
  CHECK(serializeQueries(back) == text);
  CHECK_THROWS_AS(parseQueries("{}", s.map), ParseError);
  CHECK_THROWS_AS(parseQueries(R"([{"q":[1,0,0,0],"t":[0,0,0],"camera_id":0,"label":"up"}])",
                               s.map),
                  ParseError);
}

TEST_CASE("CSV rows and comment lines") {
  const std::vector<CsvRow> rows{{"lp", "offset", 10, 7, 0.7, 0.25, std::nullopt},
                                 {"ours3d", "free-space", 4, 4, 1.0, 0.5, 123}};
  CHECK(formatCsv(rows, "run_config {}\nseed 1") ==
        "# run_config {}\n# seed 1\n"
        "method,stratum,total,localized,rate,ratio,valid_cells\n"
        "lp,offset,10,7,0.7,0.25,\n"
        "ours3d,free-space,4,4,1,0.5,123\n");
}
