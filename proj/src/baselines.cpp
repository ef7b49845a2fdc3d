#include "mapsparse/baselines.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

namespace mapsparse {

Solution greedyKCover(const Map& map, const MethodParams& params,
                      const GreedyObserver& observer) {
  MethodParams lp_params = params;
  lp_params.variant = Variant::kLP;
  const SparsificationProblem problem = buildProblem(map, lp_params);

  const std::size_t n = map.numLandmarks();
  GreedyState state;
  state.selected.assign(n, 0);
  state.deficit.resize(map.numKeyframes());
  const int k1 = std::max(params.k1, 0);
  std::size_t open_frames = 0;
  for (std::size_t k = 0; k < map.numKeyframes(); ++k) {
    const auto observed = static_cast<std::int32_t>(map.observationsOfKeyframe(k).size());
    state.deficit[k] = std::min(k1, observed);
    if (state.deficit[k] > 0) ++open_frames;
  }

  auto score = [&](std::size_t j) {
    std::int32_t s = 0;
    for (std::uint32_t o : map.observationsOfLandmark(j)) {
      if (state.deficit[map.observations()[o].keyframe] > 0) ++s;
    }
    return s;
  };

  // Scores only ever shrink, so a lazily re-scored max-heap is exact.
  using Entry = std::tuple<std::int32_t, std::int64_t, LandmarkId, std::size_t>;
  auto less = [](const Entry& a, const Entry& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) > std::get<2>(b);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(less)> heap(less);
  const auto landmarks = map.landmarks();
  for (std::size_t j = 0; j < n; ++j) {
    const std::int32_t s = score(j);
    if (s > 0) heap.emplace(s, landmarks[j].match_count, landmarks[j].id, j);
  }

  while (open_frames > 0 && !heap.empty()) {
    auto [s, mc, id, j] = heap.top();
    heap.pop();
    const std::int32_t fresh = score(j);
    if (fresh != s) {
      if (fresh > 0) heap.emplace(fresh, mc, id, j);
      continue;
    }
    state.selected[j] = 1;
    for (std::uint32_t o : map.observationsOfLandmark(j)) {
      auto& d = state.deficit[map.observations()[o].keyframe];
      if (d > 0 && --d == 0) --open_frames;
    }
    if (observer) observer(state);
  }

  // No bound is computed; zero is the trivial one (every term is >= 0).
  return makeSolution(problem, std::move(state.selected), 0.0,
                      SolveStatus::kHeuristic);
}

std::vector<std::size_t> selectedPerKeyframe(const Map& map,
                                             std::span<const std::uint8_t> x) {
  std::vector<std::size_t> counts(map.numKeyframes(), 0);
  for (const auto& o : map.observations()) {
    if (x[o.landmark]) ++counts[o.keyframe];
  }
  return counts;
}

DiResult runDi(const Map& map, MethodParams params, const SolveLimits& limits) {
  params.variant = Variant::kDI;
  const SparsificationProblem problem = buildProblem(map, params);
  DiResult out;
  out.solution = solveBnb(problem, limits);
  out.selected_per_keyframe = selectedPerKeyframe(map, out.solution.x);
  std::size_t below = 0;
  for (std::size_t c : out.selected_per_keyframe) {
    if (c < static_cast<std::size_t>(std::max(params.k1, 0))) ++below;
  }
  out.fraction_below_k1 =
      map.numKeyframes() == 0
          ? 0.0
          : static_cast<double>(below) / static_cast<double>(map.numKeyframes());
  return out;
}

}  // namespace mapsparse
