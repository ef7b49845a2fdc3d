#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mapsparse/binary_matrix.hpp"
#include "mapsparse/problem.hpp"
#include "mapsparse/solver.hpp"

namespace mapsparse::detail {

// Continuous relaxation in saddle form:
//   min_{lo <= x <= hi}  c.x + sum_r pen_r * max(0, rhs_r - (M x)_r)
// which is the LP with slacks eliminated. Identical rows (same pattern and
// rhs) are merged by summing their penalties; rows that can never change
// (empty pattern or zero penalty) are folded into `constant`.
struct CoverLp {
  std::size_t n = 0;
  std::vector<double> cost;
  BinaryMatrix rows;
  BinaryMatrix cols;  // transpose of rows
  std::vector<double> rhs;
  std::vector<double> penalty;
  double constant = 0.0;

  std::size_t numRows() const { return rows.rows(); }
};

CoverLp buildCoverLp(const SparsificationProblem& problem);

// P(x): always finite, every x in the box is feasible.
double primalValue(const CoverLp& lp, std::span<const double> x);

// Lagrangian dual value D(y) for 0 <= y <= pen. A valid lower bound on the
// relaxation (and the integer problem) for any such y.
double dualValue(const CoverLp& lp, std::span<const double> y,
                 std::span<const double> lo, std::span<const double> hi);

struct LpRun {
  std::vector<double> x;
  std::vector<double> y;
  double primal = 0.0;
  double dual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct SimplexOptions {
  std::size_t max_iterations = 0;  // 0: automatic
};

LpRun solveDenseSimplex(const CoverLp& lp, std::span<const double> lo,
                        std::span<const double> hi,
                        const SimplexOptions& options = {});

struct PdhgOptions {
  double tolerance = 1e-7;  // relative primal-dual gap
  std::size_t max_iterations = 20000;
  double time_limit_s = std::numeric_limits<double>::infinity();
  std::size_t check_every = 64;
};

LpRun solvePdhg(const CoverLp& lp, std::span<const double> lo,
                std::span<const double> hi, const PdhgOptions& options,
                const LpRun* warm_start = nullptr);

// Engine dispatch shared by the public relaxation and branch-and-bound.
// `time_limit_s` caps the first-order engine only.
LpRun solveCoverLp(const CoverLp& lp, std::span<const double> lo,
                   std::span<const double> hi, const LpOptions& options,
                   LpEngine* used, const LpRun* warm_start = nullptr,
                   double time_limit_s = std::numeric_limits<double>::infinity());

}  // namespace mapsparse::detail
