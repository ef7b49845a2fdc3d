#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mapsparse/binary_matrix.hpp"
#include "mapsparse/grid2d.hpp"
#include "mapsparse/map_model.hpp"
#include "mapsparse/visibility3d.hpp"

namespace mapsparse {

enum class Variant { kLP, kOurs2D, kOurs3D, kDI };
enum class SlackKind { kBoundedInteger, kBinary };
enum class WeightScheme { kInverseMatch, kUniform };

std::string_view toString(Variant v);
Variant parseVariant(std::string_view s);  // lp | ours2d | ours3d | di
std::string_view toString(WeightScheme w);
WeightScheme parseWeightScheme(std::string_view s);  // inverse-match | uniform

// One family of soft covering rows: matrix * x >= rhs - slack with
// 0 <= slack <= rhs, each unit of slack costing `penalty`.
struct ConstraintBlock {
  std::string name;  // "A", "B", "C" or "D"
  BinaryMatrix matrix;
  std::vector<std::int32_t> rhs;
  double penalty = 0.0;
  SlackKind slack_kind = SlackKind::kBoundedInteger;
  std::vector<std::string> row_names;  // a_<kf>, b_<kf>_<cell>, c_<i>_<j>_<k>, d_<kf>_<cell>
};

struct SparsificationProblem {
  std::size_t n = 0;
  std::vector<double> weight;  // q
  std::vector<ConstraintBlock> blocks;
  Variant variant = Variant::kLP;
  std::vector<LandmarkId> landmark_ids;  // names x_<id> in exports

  std::size_t totalRows() const;
  std::size_t totalNonzeros() const;
  // Throws ContractViolation on inconsistent dimensions or values.
  void validate() const;
};

struct Grid3DParams {
  double resolution = 0.0;
  std::optional<Box> bounds;  // auto when empty
  std::size_t max_cells = 2'000'000;
};

struct MethodParams {
  Variant variant = Variant::kLP;
  int k1 = 50;
  int k2 = 30;
  std::optional<double> lambda1;  // 1.0, or 0.02 for DI
  double lambda2 = 0.1;
  double lambda3 = 0.5;
  Grid2DConfig grid2d;
  std::optional<Grid3DParams> grid3d;
  WeightScheme weight_scheme = WeightScheme::kInverseMatch;
  VisibilityMargins margins;
  int workers = 1;

  double effectiveLambda1() const {
    return lambda1.value_or(variant == Variant::kDI ? 0.02 : 1.0);
  }
};

// q_i = 1 / (1 + match_count_i) scaled so the largest weight is 1, or all
// ones for the uniform scheme.
std::vector<double> landmarkWeights(const Map& map, WeightScheme scheme);

// Resolves the 3D grid (explicit or automatic bounds).
Grid3DConfig resolveGrid3D(const Map& map, const RegionSet& regions,
                           const Grid3DParams& params);

struct BuildReport {
  std::size_t valid_cells = 0;     // S (Ours-3D only)
  std::optional<Grid3DConfig> grid3d;
};

SparsificationProblem buildProblem(const Map& map, const MethodParams& params,
                                   BuildReport* report = nullptr);
// Same, reusing already fitted visibility regions.
SparsificationProblem buildProblem(const Map& map, const MethodParams& params,
                                   const RegionSet& regions,
                                   BuildReport* report = nullptr);

// q.x + sum over blocks of penalty * sum_rows max(0, rhs - (M x)_row): the
// MILP objective with every slack at its cheapest feasible value for x.
double objectiveValue(const SparsificationProblem& problem,
                      std::span<const std::uint8_t> x);

// Slack values implied by x, one vector per block.
std::vector<std::vector<std::int32_t>> impliedSlacks(
    const SparsificationProblem& problem, std::span<const std::uint8_t> x);

enum class SolveStatus { kOptimal, kGapLimit, kTimeLimit, kNodeLimit, kHeuristic };
std::string_view toString(SolveStatus s);

struct Solution {
  std::vector<std::uint8_t> x;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  SolveStatus status = SolveStatus::kHeuristic;
  std::size_t nodes = 0;
  // Per-block slack values reported by whoever produced the solution.
  std::vector<std::vector<std::int32_t>> slacks;
};

// Relative gap (objective - bound) / max(1, |objective|).
double relativeGap(double objective, double bound);

// Fills objective, slacks and gap (against `bound`) from x.
Solution makeSolution(const SparsificationProblem& problem,
                      std::vector<std::uint8_t> x, double bound,
                      SolveStatus status);

struct BlockSlackReport {
  std::string name;
  std::int64_t slack_total = 0;
  std::size_t violated_rows = 0;  // rows below rhs with zero slack
  double penalty_cost = 0.0;
};

struct CheckReport {
  bool ok = false;
  double recomputed_objective = 0.0;
  double reported_objective = 0.0;
  std::vector<BlockSlackReport> blocks;
  std::string diagnostic;  // empty when ok
};

CheckReport checkSolution(const SparsificationProblem& problem,
                          const Solution& solution);

}  // namespace mapsparse
