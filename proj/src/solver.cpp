#include "mapsparse/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "activity.hpp"
#include "cover_lp.hpp"
#include "mapsparse/error.hpp"

namespace mapsparse {

std::string_view toString(LpEngine e) {
  switch (e) {
    case LpEngine::kAuto: return "auto";
    case LpEngine::kSimplex: return "simplex";
    case LpEngine::kPdhg: return "pdhg";
  }
  return "?";
}

void SolveLimits::validate() const {
  if (!(time_limit_s > 0.0)) throw ConfigError("time limit must be positive");
  if (!(gap_limit >= 0.0)) throw ConfigError("gap limit must be non-negative");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (!(lp.tolerance > 0.0)) throw ConfigError("LP tolerance must be positive");
}

namespace detail {

LpRun solveCoverLp(const CoverLp& lp, std::span<const double> lo,
                   std::span<const double> hi, const LpOptions& options,
                   LpEngine* used, const LpRun* warm_start,
                   double time_limit_s) {
  LpEngine engine = options.engine;
  if (engine == LpEngine::kAuto) {
    engine = lp.numRows() <= options.dense_row_limit ? LpEngine::kSimplex
                                                     : LpEngine::kPdhg;
  }
  if (used != nullptr) *used = engine;
  if (engine == LpEngine::kSimplex) return solveDenseSimplex(lp, lo, hi);
  PdhgOptions po;
  po.tolerance = options.tolerance;
  po.max_iterations = options.max_iterations;
  po.time_limit_s = time_limit_s;
  return solvePdhg(lp, lo, hi, po, warm_start);
}

}  // namespace detail

RelaxedSolution solveLpRelaxation(const SparsificationProblem& problem,
                                  const LpOptions& options) {
  problem.validate();
  const detail::CoverLp lp = detail::buildCoverLp(problem);
  const std::vector<double> lo(problem.n, 0.0), hi(problem.n, 1.0);
  RelaxedSolution out;
  detail::LpRun run = detail::solveCoverLp(lp, lo, hi, options, &out.engine);
  out.x_frac = std::move(run.x);
  out.primal = run.primal;
  out.bound = std::min(run.dual, run.primal);
  out.gap = relativeGap(out.primal, out.bound);
  out.iterations = run.iterations;
  return out;
}

Solution roundRelaxation(const SparsificationProblem& problem,
                         const RelaxedSolution& relaxed) {
  if (relaxed.x_frac.size() != problem.n) {
    throw ContractViolation("relaxed point length differs from landmark count");
  }
  constexpr double kImprove = -1e-12;
  std::vector<std::size_t> order(problem.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (relaxed.x_frac[a] != relaxed.x_frac[b]) {
      return relaxed.x_frac[a] > relaxed.x_frac[b];
    }
    return problem.weight[a] < problem.weight[b];
  });

  detail::ActivityTracker tracker(problem);
  for (std::size_t j : order) {
    if (relaxed.x_frac[j] <= 0.0) break;
    if (tracker.addDelta(j) < kImprove) tracker.add(j);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (tracker.selected(*it) && tracker.dropDelta(*it) < kImprove) {
      tracker.drop(*it);
    }
  }
  return makeSolution(problem, tracker.selection(), relaxed.bound,
                      SolveStatus::kHeuristic);
}

Solution solveExhaustive(const SparsificationProblem& problem) {
  problem.validate();
  const std::size_t n = problem.n;
  if (n > kExhaustiveMaxN) {
    throw ContractViolation("exhaustive search refuses N = " + std::to_string(n) +
                            " (limit " + std::to_string(kExhaustiveMaxN) + ")");
  }
  // Gray-code walk with incremental objective; candidates within a small
  // window of the best are re-scored exactly so ties resolve on exact values.
  detail::ActivityTracker tracker(problem);
  std::vector<std::uint8_t> best = tracker.selection();
  double best_value = objectiveValue(problem, best);
  const double window = 1e-7 * std::max(1.0, std::abs(best_value));
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(k));
    tracker.flip(bit);
    if (tracker.objective() > best_value + window) continue;
    const auto& x = tracker.selection();
    const double exact = objectiveValue(problem, x);
    if (exact < best_value ||
        (exact == best_value &&
         std::lexicographical_compare(x.begin(), x.end(), best.begin(), best.end()))) {
      best_value = exact;
      best = x;
    }
  }
  Solution s = makeSolution(problem, std::move(best), best_value,
                            SolveStatus::kOptimal);
  s.nodes = static_cast<std::size_t>(total);
  return s;
}

}  // namespace mapsparse
