#include <doctest.h>

#include <chrono>
#include <random>

#include "../src/cover_lp.hpp"
#include "fixtures.hpp"
#include "mapsparse/error.hpp"
#include "mapsparse/solver.hpp"

using namespace mapsparse;

namespace {

std::vector<std::uint8_t> randomSelection(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint8_t> x(n);
  for (auto& v : x) v = static_cast<std::uint8_t>(rng() & 1u);
  return x;
}

std::size_t countOccurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + 1)) {
    ++count;
  }
  return count;
}

std::string section(const std::string& text, const std::string& head,
                    const std::string& next) {
  const auto b = text.find(head + "\n");
  const auto e = text.find(next + "\n", b);
  return text.substr(b + head.size() + 1, e - b - head.size() - 1);
}

}  // namespace

TEST_CASE("three-landmark instance: relaxation, exact and exhaustive agree") {
  const auto p = fixtures::threeLandmarkProblem();
  const auto relaxed = solveLpRelaxation(p);
  CHECK(relaxed.bound <= 1.0 + 1e-12);
  for (double v : relaxed.x_frac) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  const auto exact = solveBnb(p);
  CHECK(exact.x == std::vector<std::uint8_t>{0, 1, 0});
  CHECK(exact.objective == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((exact.status == SolveStatus::kOptimal));

  const auto oracle = solveExhaustive(p);
  CHECK(oracle.objective == 1.0);
  CHECK(oracle.x == std::vector<std::uint8_t>{0, 1, 0});
}

TEST_CASE("relaxation with no reward for selection stays at zero") {
  const auto scene = fixtures::ringScene(3, 30, 6);
  SUBCASE("LP variant") {
    auto params = fixtures::smallParams(Variant::kLP);
    params.lambda1 = 0.0;
    const auto relaxed = solveLpRelaxation(buildProblem(scene, params));
    for (double v : relaxed.x_frac) CHECK(v == 0.0);
    CHECK(relaxed.bound == 0.0);
  }
  SUBCASE("cell penalties too small to pay for any landmark") {
    auto params = fixtures::smallParams(Variant::kOurs2D);
    params.lambda1 = 0.0;
    auto p = buildProblem(scene, params);
    const auto counts = p.blocks[1].matrix.columnCounts();
    const double q_min = *std::min_element(p.weight.begin(), p.weight.end());
    const auto c_max = *std::max_element(counts.begin(), counts.end());
    p.blocks[1].penalty = 0.5 * q_min / c_max;
    const auto relaxed = solveLpRelaxation(p);
    for (double v : relaxed.x_frac) CHECK(v == 0.0);
    const double expected =
        p.blocks[1].penalty * static_cast<double>(p.blocks[1].matrix.rows());
    CHECK(relaxed.bound == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("relaxation bound dominates random integer points") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = fixtures::randomProblem(rng, 10 + trial, 6, Variant::kOurs3D);
    const auto relaxed = solveLpRelaxation(p);
    for (int k = 0; k < 100; ++k) {
      const auto x = randomSelection(rng, p.n);
      REQUIRE(relaxed.bound <= objectiveValue(p, x) + 1e-9);
    }
  }
}

TEST_CASE("first-order engine agrees with the simplex engine") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = fixtures::randomProblem(rng, 40, 12, Variant::kOurs3D);
    LpOptions simplex;
    simplex.engine = LpEngine::kSimplex;
    LpOptions pdhg;
    pdhg.engine = LpEngine::kPdhg;
    pdhg.max_iterations = 200000;
    const auto a = solveLpRelaxation(p, simplex);
    const auto b = solveLpRelaxation(p, pdhg);
    CHECK(a.gap <= 1e-9);
    CHECK(b.gap <= 1e-7);
    CHECK(b.bound <= a.primal + 1e-9);
    CHECK(b.primal >= a.bound - 1e-9);
    CHECK(b.primal == doctest::Approx(a.primal).epsilon(1e-6));
  }
}

TEST_CASE("vacuous constraints give the empty selection") {
  const auto scene = fixtures::ringScene(8, 12, 4);
  auto params = fixtures::smallParams(Variant::kOurs3D);
  params.k1 = 0;
  params.lambda2 = 0.0;
  params.lambda3 = 0.0;
  const auto p = buildProblem(scene, params);
  const auto s = solveBnb(p);
  CHECK(s.objective == 0.0);
  CHECK(std::count(s.x.begin(), s.x.end(), 1) == 0);
  CHECK((s.status == SolveStatus::kOptimal));
}

TEST_CASE("branch-and-bound matches the exhaustive oracle on random instances") {
  std::mt19937_64 rng(2024);
  const Variant variants[] = {Variant::kLP, Variant::kOurs2D, Variant::kOurs3D,
                              Variant::kDI};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + rng() % 9;
    const std::size_t m = 1 + rng() % 6;
    const auto p = fixtures::randomProblem(rng, n, m, variants[trial % 4]);
    const auto exact = solveBnb(p);
    const auto oracle = solveExhaustive(p);
    REQUIRE((exact.status == SolveStatus::kOptimal));
    CHECK(std::abs(exact.objective - oracle.objective) <= 1e-9);
    CHECK(checkSolution(p, exact).ok);
  }
}

TEST_CASE("bound sandwich and feasibility") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = fixtures::randomProblem(rng, 12, 5, Variant::kOurs2D);
    const auto relaxed = solveLpRelaxation(p);
    const auto s = solveBnb(p);
    CHECK(relaxed.bound <= s.bound + 1e-9);
    CHECK(s.bound <= s.objective + 1e-9);
    CHECK(checkSolution(p, s).ok);
  }
}

TEST_CASE("node limit zero falls back to the rounded heuristic") {
  std::mt19937_64 rng(3);
  const auto p = fixtures::randomProblem(rng, 12, 5, Variant::kOurs2D);
  SolveLimits limits;
  limits.node_limit = 0;
  const auto s = solveBnb(p, limits);
  CHECK((s.status == SolveStatus::kHeuristic));
  const auto rounded = roundRelaxation(p, solveLpRelaxation(p));
  CHECK(s.x == rounded.x);
}

TEST_CASE("parallel workers reach the same optimal objective") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = fixtures::randomProblem(rng, 12, 6, Variant::kOurs3D);
    SolveLimits limits;
    limits.workers = 3;
    const auto a = solveBnb(p);
    const auto b = solveBnb(p, limits);
    CHECK((b.status == SolveStatus::kOptimal));
    CHECK(std::abs(a.objective - b.objective) <= 1e-9);
  }
}

TEST_CASE("single-worker solves are bit-reproducible") {
  const auto scene = fixtures::ringScene(21, 40, 8);
  const auto p = buildProblem(scene, fixtures::smallParams(Variant::kOurs2D));
  const auto a = solveBnb(p);
  const auto b = solveBnb(p);
  CHECK(a.x == b.x);
  CHECK(a.objective == b.objective);
  CHECK(a.bound == b.bound);
}

TEST_CASE("rounding") {
  SUBCASE("integral relaxed point is kept") {
    const auto p = fixtures::threeLandmarkProblem();
    RelaxedSolution r;
    r.x_frac = {0.0, 1.0, 0.0};
    r.bound = 1.0;
    const auto s = roundRelaxation(p, r);
    CHECK(s.x == std::vector<std::uint8_t>{0, 1, 0});
    CHECK((s.status == SolveStatus::kHeuristic));
  }
  SUBCASE("all-zero relaxed point gives the empty selection") {
    const auto p = fixtures::threeLandmarkProblem();
    RelaxedSolution r;
    r.x_frac = {0.0, 0.0, 0.0};
    const auto s = roundRelaxation(p, r);
    CHECK(s.x == std::vector<std::uint8_t>{0, 0, 0});
  }
  SUBCASE("heuristic quality against the oracle") {
    std::mt19937_64 rng(404);
    const Variant variants[] = {Variant::kLP, Variant::kOurs2D, Variant::kOurs3D,
                                Variant::kDI};
    int within = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 4 + rng() % 9;
      const auto p = fixtures::randomProblem(rng, n, 1 + rng() % 6, variants[trial % 4]);
      const auto relaxed = solveLpRelaxation(p);
      const auto s = roundRelaxation(p, relaxed);
      const auto oracle = solveExhaustive(p);
      CHECK(s.objective >= relaxed.bound - 1e-9);
      CHECK(s.objective >= oracle.objective - 1e-9);
      if (s.objective <= 1.05 * oracle.objective + 1e-12) ++within;
    }
    MESSAGE("rounding within 5% of optimum in " << within << "/200 trials");
    CHECK(within >= 180);
  }
}

TEST_CASE("exhaustive oracle") {
  SUBCASE("single landmark without constraints") {
    SparsificationProblem p;
    p.n = 1;
    p.weight = {1.0};
    p.landmark_ids = {7};
    const auto s = solveExhaustive(p);
    CHECK(s.x == std::vector<std::uint8_t>{0});
    CHECK(s.objective == 0.0);
  }
  SUBCASE("refuses more than 25 landmarks") {
    SparsificationProblem p;
    p.n = 26;
    p.weight.assign(26, 1.0);
    CHECK_THROWS_AS(solveExhaustive(p), ContractViolation);
  }
  SUBCASE("N = 12 completes quickly and matches branch-and-bound") {
    std::mt19937_64 rng(12);
    const auto p = fixtures::randomProblem(rng, 12, 6, Variant::kOurs3D);
    const auto t0 = std::chrono::steady_clock::now();
    const auto oracle = solveExhaustive(p);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 1.0);
    CHECK(solveBnb(p).objective == doctest::Approx(oracle.objective).epsilon(1e-12));
  }
}

TEST_CASE("LP export") {
  const auto p = fixtures::threeLandmarkProblem();
  const std::string text = formatLp(p, "run_config: test");
  CHECK(text.rfind("\\ run_config: test\n", 0) == 0);
  const std::string bins = section(text, "Binaries", "Generals");
  const std::string gens = section(text, "Generals", "End");
  const std::string rows = section(text, "Subject To", "Bounds");
  CHECK(countOccurrences(bins, "x_") == 3);
  CHECK(countOccurrences(gens, "s_") == 2);
  CHECK(countOccurrences(rows, ">=") == 2);
  CHECK(text.find(" a_0: x_0 + x_1 + s_a_0 >= 1\n") != std::string::npos);
  CHECK(text.find(" 0 <= s_a_1 <= 1\n") != std::string::npos);
  CHECK(formatLp(p, "run_config: test") == text);

  SUBCASE("negative ids are written without minus signs") {
    auto q = p;
    q.landmark_ids = {-4, 1, 2};
    q.blocks[0].row_names = {"a_-1", "a_2"};
    const std::string t = formatLp(q);
    CHECK(t.find("x_n4") != std::string::npos);
    CHECK(t.find("a_n1:") != std::string::npos);
  }
  SUBCASE("binary slacks go to Binaries") {
    std::mt19937_64 rng(1);
    const auto q = fixtures::randomProblem(rng, 6, 2, Variant::kOurs2D);
    const std::string t = formatLp(q);
    const std::string b = section(t, "Binaries", "Generals");
    CHECK(countOccurrences(b, "s_b_") == q.blocks[1].matrix.rows());
  }
}
