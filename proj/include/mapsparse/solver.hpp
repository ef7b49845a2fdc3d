#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "mapsparse/problem.hpp"

namespace mapsparse {

enum class LpEngine { kAuto, kSimplex, kPdhg };
std::string_view toString(LpEngine e);

struct LpOptions {
  LpEngine engine = LpEngine::kAuto;
  // Relative primal-dual gap the first-order engine aims for. The simplex
  // engine always runs to exact optimality.
  double tolerance = 1e-7;
  std::size_t max_iterations = 20000;  // first-order engine only
  // kAuto uses the dense simplex up to this many (merged) rows.
  std::size_t dense_row_limit = 600;
};

struct RelaxedSolution {
  std::vector<double> x_frac;
  double bound = 0.0;    // Lagrangian dual value: a valid lower bound
  double primal = 0.0;   // relaxation objective at x_frac
  double gap = 0.0;      // relative (primal - bound)
  LpEngine engine = LpEngine::kSimplex;
  std::size_t iterations = 0;
};

RelaxedSolution solveLpRelaxation(const SparsificationProblem& problem,
                                  const LpOptions& options = {});

inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();

struct SolveLimits {
  double time_limit_s = kUnlimited;
  double gap_limit = 1e-6;
  std::size_t node_limit = std::numeric_limits<std::size_t>::max();
  int workers = 1;
  LpOptions lp;

  // Throws ConfigError on non-positive values.
  void validate() const;
};

// Deterministic rounding of a relaxed point followed by one drop pass.
Solution roundRelaxation(const SparsificationProblem& problem,
                         const RelaxedSolution& relaxed);

// Best-first branch-and-bound. Single-worker runs are deterministic.
Solution solveBnb(const SparsificationProblem& problem,
                  const SolveLimits& limits = {});

// Ground-truth enumeration of all 2^N selections; refuses N > 25.
inline constexpr std::size_t kExhaustiveMaxN = 25;
Solution solveExhaustive(const SparsificationProblem& problem);

// Explicit MILP in CPLEX LP text format. `comment` is emitted as leading
// backslash comment lines (may be empty).
std::string formatLp(const SparsificationProblem& problem,
                     std::string_view comment = {});
void exportLp(const SparsificationProblem& problem,
              const std::filesystem::path& path,
              std::string_view comment = {});

}  // namespace mapsparse
