#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mapsparse/map_model.hpp"
#include "mapsparse/problem.hpp"

namespace fixtures {

// Small ring-of-cameras scene: `keyframes` cameras on a circle looking at a
// cloud of `landmarks` points near the origin. Each in-view landmark is
// observed with probability `density`, so association patterns are random.
mapsparse::Map ringScene(std::uint64_t seed, std::size_t landmarks,
                         std::size_t keyframes, double density = 0.7);

// The three-landmark, two-keyframe covering instance used throughout:
// A = [[1,1,0],[0,1,1]], K1 = 1, q = 1, lambda1 = 10.
mapsparse::SparsificationProblem threeLandmarkProblem();

// Random problem assembled directly from random 0/1 blocks.
mapsparse::SparsificationProblem randomProblem(std::mt19937_64& rng,
                                               std::size_t n, std::size_t m,
                                               mapsparse::Variant variant);

// Parameters sized for ringScene: small K values and coarse grids.
mapsparse::MethodParams smallParams(mapsparse::Variant variant);

}  // namespace fixtures
