#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "mapsparse/baselines.hpp"
#include "mapsparse/synth.hpp"

using namespace mapsparse;

namespace {

const CameraModel kVga{0, 500, 500, 320, 240, 640, 480};

// Identity-pose keyframes; `seen[k]` lists the landmark indices keyframe k
// observes. Landmark j sits at `points[j]`.
Map fromVisibility(const std::vector<Eigen::Vector3d>& points,
                   const std::vector<std::vector<int>>& seen,
                   std::vector<std::int64_t> match_counts = {}) {
  std::vector<Landmark> lms;
  for (std::size_t j = 0; j < points.size(); ++j) {
    lms.push_back({static_cast<LandmarkId>(j), points[j],
                   match_counts.empty() ? 1 : match_counts[j]});
  }
  std::vector<Keyframe> kfs;
  std::vector<Observation> obs;
  for (std::size_t k = 0; k < seen.size(); ++k) {
    kfs.push_back({static_cast<KeyframeId>(k), 0, {}});
    for (int j : seen[k]) {
      obs.push_back({static_cast<KeyframeId>(k), static_cast<LandmarkId>(j),
                     *project(kVga, {}, points[j])});
    }
  }
  return Map::build({kVga}, kfs, lms, obs);
}

}  // namespace

TEST_CASE("greedy picks the landmark shared by both keyframes") {
  const Map m = fromVisibility({{-0.5, 0, 2}, {0, 0, 2}, {0.5, 0, 2}}, {{0, 1}, {1, 2}});
  MethodParams params;
  params.k1 = 1;
  const auto s = greedyKCover(m, params);
  CHECK(s.x == std::vector<std::uint8_t>{0, 1, 0});
  CHECK((s.status == SolveStatus::kHeuristic));
  CHECK(s.objective == doctest::Approx(objectiveValue(buildProblem(m, params), s.x)));
}

TEST_CASE("greedy tie-break prefers higher match count, then lower id") {
  const Map m = fromVisibility({{-0.5, 0, 2}, {0, 0, 2}, {0.5, 0, 2}}, {{0, 1, 2}}, {3, 7, 7});
  MethodParams params;
  params.k1 = 1;
  CHECK(greedyKCover(m, params).x == std::vector<std::uint8_t>{0, 1, 0});
}

TEST_CASE("greedy clamps deficits to the landmarks a keyframe observes") {
  const Map m = fromVisibility({{-0.5, 0, 2}, {0, 0, 2}, {0.5, 0, 2}}, {{0, 1, 2}});
  MethodParams params;
  params.k1 = 5;
  std::vector<GreedyState> trace;
  const auto s = greedyKCover(m, params, [&](const GreedyState& st) { trace.push_back(st); });
  CHECK(s.x == std::vector<std::uint8_t>{1, 1, 1});
  REQUIRE(!trace.empty());
  CHECK(trace.size() <= 3);
  CHECK(trace.back().deficit == std::vector<std::int32_t>{0});
  // After the first pick the deficit is 3 - 1.
  CHECK(trace.front().deficit == std::vector<std::int32_t>{2});
}

TEST_CASE("greedy invariants on random scenes") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Map m = fixtures::ringScene(seed, 60, 8, 0.5);
    MethodParams params;
    params.k1 = 6;
    std::vector<GreedyState> trace;
    const auto s = greedyKCover(m, params, [&](const GreedyState& st) { trace.push_back(st); });
    CHECK(trace.size() <= m.numLandmarks());
    for (std::size_t t = 0; t < trace.size(); ++t) {
      for (std::size_t k = 0; k < trace[t].deficit.size(); ++k) {
        CHECK(trace[t].deficit[k] >= 0);
        if (t > 0) CHECK(trace[t].deficit[k] <= trace[t - 1].deficit[k]);
      }
    }
    const auto per_kf = selectedPerKeyframe(m, s.x);
    for (std::size_t k = 0; k < m.numKeyframes(); ++k) {
      const auto observed = m.observationsOfKeyframe(k).size();
      CHECK(per_kf[k] >= std::min<std::size_t>(6, observed));
    }
  }
}

TEST_CASE("greedy never beats the exhaustive optimum") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Map m = fixtures::ringScene(seed, 12, 5, 0.6);
    MethodParams params;
    params.k1 = 3;
    const auto g = greedyKCover(m, params);
    const auto best = solveExhaustive(buildProblem(m, params));
    CHECK(g.objective >= best.objective - 1e-9);
  }
}

TEST_CASE("DI with a 1x1 grid is the LP problem") {
  const Map m = fixtures::ringScene(5, 14, 5);
  MethodParams lp = fixtures::smallParams(Variant::kLP);
  MethodParams di = lp;
  di.variant = Variant::kDI;
  di.grid2d = {1, 1};
  di.lambda1 = lp.effectiveLambda1();
  const auto a = buildProblem(m, lp);
  const auto d = buildProblem(m, di);
  REQUIRE(d.blocks.size() == 1);
  // The LP block keeps rows for keyframes without observations; DI does not.
  std::size_t r = 0;
  for (std::size_t k = 0; k < a.blocks[0].matrix.rows(); ++k) {
    if (a.blocks[0].matrix.rowCount(k) == 0) continue;
    REQUIRE(r < d.blocks[0].matrix.rows());
    CHECK(std::ranges::equal(a.blocks[0].matrix.row(k), d.blocks[0].matrix.row(r)));
    CHECK(d.blocks[0].rhs[r] == lp.k1);
    ++r;
  }
  CHECK(r == d.blocks[0].matrix.rows());
  const auto res = runDi(m, di, SolveLimits{});
  CHECK(res.solution.objective == doctest::Approx(solveBnb(a).objective));
}

TEST_CASE("DI caps a keyframe whose landmarks share one cell") {
  std::vector<Eigen::Vector3d> pts;
  std::vector<int> all;
  for (int j = 0; j < 8; ++j) {
    pts.push_back({-1.0 + 0.05 * j, -0.8, 2.0});  // top-left quadrant
    all.push_back(j);
  }
  const Map m = fromVisibility(pts, {all});
  MethodParams params;
  params.variant = Variant::kDI;
  params.k1 = 10;
  params.grid2d = {2, 2};
  params.lambda1 = 10.0;  // slack dearer than any landmark
  const auto res = runDi(m, params, SolveLimits{});
  CHECK(res.selected_per_keyframe == std::vector<std::size_t>{3});  // ceil(10/4)
  CHECK(res.fraction_below_k1 == 1.0);
}

TEST_CASE("DI leaves keyframes short of K1 on a clustered scene") {
  SceneSpec spec;
  spec.n_landmarks = 400;
  spec.n_keyframes = 12;
  spec.placement = PlacementKind::kClustered;
  spec.clusters = 2;
  spec.cluster_sigma = 0.15;
  spec.seed = 4;
  const Map m = generateMap(spec);
  MethodParams params;
  params.variant = Variant::kDI;
  params.k1 = 50;
  params.lambda1 = 1.0;
  SolveLimits limits;
  limits.time_limit_s = 20.0;
  limits.gap_limit = 1e-3;
  const auto res = runDi(m, params, limits);
  CHECK(res.fraction_below_k1 > 0.0);
  const auto per_kf = selectedPerKeyframe(m, res.solution.x);
  CHECK(per_kf == res.selected_per_keyframe);
}
