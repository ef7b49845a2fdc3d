#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mapsparse/map_model.hpp"
#include "mapsparse/problem.hpp"
#include "mapsparse/solver.hpp"

namespace mapsparse {

// Greedy K-cover progress after each pick.
struct GreedyState {
  std::vector<std::int32_t> deficit;  // per keyframe, starts at min(K1, #observed)
  std::vector<std::uint8_t> selected;
};

using GreedyObserver = std::function<void(const GreedyState&)>;

// Repeatedly picks the landmark seen by the most keyframes that still have a
// positive deficit (ties: higher match_count, then lower id). The returned
// objective is scored under the LP-variant problem built from `params`
// (k1, lambda1, weight scheme).
Solution greedyKCover(const Map& map, const MethodParams& params,
                      const GreedyObserver& observer = {});

// Per-keyframe count of selected landmarks it observes.
std::vector<std::size_t> selectedPerKeyframe(const Map& map,
                                             std::span<const std::uint8_t> x);

struct DiResult {
  Solution solution;
  std::vector<std::size_t> selected_per_keyframe;
  double fraction_below_k1 = 0.0;  // keyframes left with fewer than K1
};

// Divided-image baseline: builds the DI problem from params (variant is
// forced to DI) and solves it with branch-and-bound under `limits`.
DiResult runDi(const Map& map, MethodParams params, const SolveLimits& limits);

}  // namespace mapsparse
