#include "mapsparse/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mapsparse/error.hpp"

namespace mapsparse {
namespace {

std::string rowName(const char* prefix, KeyframeId kf) {
  return std::string(prefix) + "_" + std::to_string(kf);
}

ConstraintBlock makeBlock(std::string name, BinaryMatrix matrix,
                          std::int32_t rhs, double penalty, SlackKind kind) {
  ConstraintBlock b;
  b.name = std::move(name);
  b.rhs.assign(matrix.rows(), rhs);
  b.matrix = std::move(matrix);
  b.penalty = penalty;
  b.slack_kind = kind;
  return b;
}

ConstraintBlock keyframeBlock(const Map& map, int k1, double lambda1) {
  BinaryMatrix a = associationMatrix(map);
  if (k1 <= 0) a = BinaryMatrix(0, map.numLandmarks());
  ConstraintBlock b = makeBlock("A", std::move(a), k1, lambda1,
                                SlackKind::kBoundedInteger);
  for (std::size_t r = 0; r < b.matrix.rows(); ++r) {
    b.row_names.push_back(rowName("a", map.keyframes()[r].id));
  }
  return b;
}

ConstraintBlock cellBlock(const Map& map, const Grid2DConfig& grid,
                          const char* name, const char* prefix,
                          std::int32_t rhs, double penalty, SlackKind kind) {
  OccupancyMatrix occ = occupancyMatrix(map, grid);
  ConstraintBlock b =
      makeBlock(name, std::move(occ.matrix), rhs, penalty, kind);
  for (const auto& label : occ.labels) {
    b.row_names.push_back(rowName(prefix, label.keyframe_id) + "_" +
                          std::to_string(label.cell.linear(grid)));
  }
  return b;
}

}  // namespace

std::string_view toString(Variant v) {
  switch (v) {
    case Variant::kLP: return "lp";
    case Variant::kOurs2D: return "ours2d";
    case Variant::kOurs3D: return "ours3d";
    case Variant::kDI: return "di";
  }
  return "?";
}

Variant parseVariant(std::string_view s) {
  if (s == "lp") return Variant::kLP;
  if (s == "ours2d") return Variant::kOurs2D;
  if (s == "ours3d") return Variant::kOurs3D;
  if (s == "di") return Variant::kDI;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

std::string_view toString(WeightScheme w) {
  return w == WeightScheme::kUniform ? "uniform" : "inverse-match";
}

WeightScheme parseWeightScheme(std::string_view s) {
  if (s == "inverse-match") return WeightScheme::kInverseMatch;
  if (s == "uniform") return WeightScheme::kUniform;
  throw ConfigError("unknown weight scheme '" + std::string(s) + "'");
}

std::string_view toString(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kGapLimit: return "gap-limit";
    case SolveStatus::kTimeLimit: return "time-limit";
    case SolveStatus::kNodeLimit: return "node-limit";
    case SolveStatus::kHeuristic: return "heuristic";
  }
  return "?";
}

std::size_t SparsificationProblem::totalRows() const {
  std::size_t r = 0;
  for (const auto& b : blocks) r += b.matrix.rows();
  return r;
}

std::size_t SparsificationProblem::totalNonzeros() const {
  std::size_t r = 0;
  for (const auto& b : blocks) r += b.matrix.nnz();
  return r;
}

void SparsificationProblem::validate() const {
  if (weight.size() != n) {
    throw ContractViolation("weight vector length differs from landmark count");
  }
  for (double q : weight) {
    if (!std::isfinite(q) || !(q > 0.0)) {
      throw ContractViolation("weights must be finite and positive");
    }
  }
  if (!landmark_ids.empty() && landmark_ids.size() != n) {
    throw ContractViolation("landmark id list length differs from n");
  }
  for (const auto& b : blocks) {
    if (b.matrix.cols() != n) {
      throw ContractViolation("block " + b.name + " has wrong column count");
    }
    if (b.rhs.size() != b.matrix.rows()) {
      throw ContractViolation("block " + b.name + " rhs length mismatch");
    }
    if (!(b.penalty >= 0.0) || !std::isfinite(b.penalty)) {
      throw ContractViolation("block " + b.name + " penalty must be >= 0");
    }
    for (auto r : b.rhs) {
      if (r < 1) throw ContractViolation("block " + b.name + " has rhs < 1");
      if (b.slack_kind == SlackKind::kBinary && r != 1) {
        throw ContractViolation("binary slack block " + b.name +
                                " needs rhs = 1");
      }
    }
    if (!b.row_names.empty() && b.row_names.size() != b.matrix.rows()) {
      throw ContractViolation("block " + b.name + " row name count mismatch");
    }
  }
}

std::vector<double> landmarkWeights(const Map& map, WeightScheme scheme) {
  std::vector<double> q(map.numLandmarks(), 1.0);
  if (scheme == WeightScheme::kUniform || q.empty()) return q;
  double max_q = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    q[j] = 1.0 / (1.0 + static_cast<double>(map.landmarks()[j].match_count));
    max_q = std::max(max_q, q[j]);
  }
  for (double& v : q) v /= max_q;
  return q;
}

Grid3DConfig resolveGrid3D(const Map& map, const RegionSet& regions,
                           const Grid3DParams& params) {
  Grid3DConfig grid;
  grid.resolution = params.resolution;
  grid.max_cells = params.max_cells;
  grid.bounds = params.bounds ? *params.bounds : autoBounds(map, regions);
  grid.validate();
  return grid;
}

SparsificationProblem buildProblem(const Map& map, const MethodParams& params,
                                   BuildReport* report) {
  RegionSet regions;
  if (params.variant == Variant::kOurs3D) {
    if (!params.grid3d) {
      throw ConfigError("ours3d needs a 3D grid resolution (--grid3d-res)");
    }
    regions = fitAllVisibility(map, params.margins, params.workers);
  }
  return buildProblem(map, params, regions, report);
}

SparsificationProblem buildProblem(const Map& map, const MethodParams& params,
                                   const RegionSet& regions,
                                   BuildReport* report) {
  if (params.k1 < 0) throw ConfigError("k1 must be non-negative");
  if (params.k2 < 1) throw ConfigError("k2 must be a positive integer");
  const double lambda1 = params.effectiveLambda1();
  if (!(lambda1 >= 0.0) || !(params.lambda2 >= 0.0) || !(params.lambda3 >= 0.0)) {
    throw ConfigError("penalties must be non-negative");
  }
  if (params.variant == Variant::kOurs3D && !params.grid3d) {
    throw ConfigError("ours3d needs a 3D grid resolution (--grid3d-res)");
  }

  SparsificationProblem p;
  p.n = map.numLandmarks();
  p.variant = params.variant;
  p.weight = landmarkWeights(map, params.weight_scheme);
  p.landmark_ids.reserve(p.n);
  for (const auto& lm : map.landmarks()) p.landmark_ids.push_back(lm.id);

  if (params.variant == Variant::kDI) {
    const int cells = params.grid2d.cellCount();
    const int rhs = params.k1 <= 0 ? 0 : (params.k1 + cells - 1) / cells;
    if (rhs > 0) {
      p.blocks.push_back(cellBlock(map, params.grid2d, "D", "d", rhs, lambda1,
                                   SlackKind::kBoundedInteger));
    } else {
      validateGrid(params.grid2d, map);
    }
  } else {
    p.blocks.push_back(keyframeBlock(map, params.k1, lambda1));
  }
  if (params.variant == Variant::kOurs2D || params.variant == Variant::kOurs3D) {
    p.blocks.push_back(cellBlock(map, params.grid2d, "B", "b", 1,
                                 params.lambda2, SlackKind::kBinary));
  }
  if (params.variant == Variant::kOurs3D) {
    if (regions.size() != map.numLandmarks()) {
      throw ContractViolation("visibility regions do not match the map");
    }
    const Grid3DConfig grid = resolveGrid3D(map, regions, *params.grid3d);
    ValidCellSet cells =
        validCells(map, regions, grid, params.k2, params.workers);
    ConstraintBlock c = makeBlock("C", std::move(cells.matrix), params.k2,
                                  params.lambda3, SlackKind::kBoundedInteger);
    for (const auto& cell : cells.cells) {
      c.row_names.push_back("c_" + std::to_string(cell.index[0]) + "_" +
                            std::to_string(cell.index[1]) + "_" +
                            std::to_string(cell.index[2]));
    }
    if (report) {
      report->valid_cells = c.matrix.rows();
      report->grid3d = grid;
    }
    p.blocks.push_back(std::move(c));
  }
  p.validate();
  return p;
}

std::vector<std::vector<std::int32_t>> impliedSlacks(
    const SparsificationProblem& problem, std::span<const std::uint8_t> x) {
  std::vector<std::vector<std::int32_t>> out;
  out.reserve(problem.blocks.size());
  for (const auto& b : problem.blocks) {
    std::vector<std::int32_t> act = b.matrix.multiply(x);
    for (std::size_t r = 0; r < act.size(); ++r) {
      act[r] = std::max(0, b.rhs[r] - act[r]);
    }
    out.push_back(std::move(act));
  }
  return out;
}

double objectiveValue(const SparsificationProblem& problem,
                      std::span<const std::uint8_t> x) {
  if (x.size() != problem.n) {
    throw ContractViolation("selection length differs from landmark count");
  }
  double obj = 0.0;
  for (std::size_t j = 0; j < problem.n; ++j) {
    if (x[j]) obj += problem.weight[j];
  }
  for (const auto& b : problem.blocks) {
    std::int64_t deficit = 0;
    for (std::size_t r = 0; r < b.matrix.rows(); ++r) {
      std::int32_t act = 0;
      for (std::uint32_t c : b.matrix.row(r)) act += x[c] ? 1 : 0;
      deficit += std::max(0, b.rhs[r] - act);
    }
    obj += b.penalty * static_cast<double>(deficit);
  }
  return obj;
}

double relativeGap(double objective, double bound) {
  return std::max(0.0, objective - bound) / std::max(1.0, std::abs(objective));
}

Solution makeSolution(const SparsificationProblem& problem,
                      std::vector<std::uint8_t> x, double bound,
                      SolveStatus status) {
  Solution s;
  s.objective = objectiveValue(problem, x);
  s.slacks = impliedSlacks(problem, x);
  s.x = std::move(x);
  s.bound = std::min(bound, s.objective);
  s.gap = relativeGap(s.objective, s.bound);
  s.status = status;
  return s;
}

CheckReport checkSolution(const SparsificationProblem& problem,
                          const Solution& solution) {
  CheckReport rep;
  rep.reported_objective = solution.objective;
  if (solution.x.size() != problem.n) {
    rep.diagnostic = "selection length " + std::to_string(solution.x.size()) +
                     " differs from landmark count " +
                     std::to_string(problem.n);
    return rep;
  }
  rep.recomputed_objective = objectiveValue(problem, solution.x);
  const auto implied = impliedSlacks(problem, solution.x);

  std::string first_divergent;
  for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
    const ConstraintBlock& blk = problem.blocks[b];
    BlockSlackReport br;
    br.name = blk.name;
    for (std::size_t r = 0; r < implied[b].size(); ++r) {
      br.slack_total += implied[b][r];
      if (implied[b][r] > 0) ++br.violated_rows;
      if (first_divergent.empty() && b < solution.slacks.size() &&
          r < solution.slacks[b].size() &&
          solution.slacks[b][r] != implied[b][r]) {
        std::ostringstream os;
        os << "block " << blk.name << " row "
           << (r < blk.row_names.size() ? blk.row_names[r] : std::to_string(r))
           << ": reported slack " << solution.slacks[b][r] << ", implied "
           << implied[b][r];
        first_divergent = os.str();
      }
    }
    br.penalty_cost = blk.penalty * static_cast<double>(br.slack_total);
    rep.blocks.push_back(br);
  }

  const double tol = 1e-6 * std::max(1.0, std::abs(rep.recomputed_objective));
  const bool objective_ok =
      std::abs(rep.recomputed_objective - solution.objective) <= tol;
  rep.ok = objective_ok && first_divergent.empty();
  if (!rep.ok) {
    std::ostringstream os;
    if (!objective_ok) {
      os.precision(17);
      os << "objective mismatch: reported " << solution.objective
         << ", recomputed " << rep.recomputed_objective;
    }
    if (!first_divergent.empty()) {
      if (!objective_ok) os << "; ";
      os << "first divergent " << first_divergent;
    }
    rep.diagnostic = os.str();
  }
  return rep;
}

}  // namespace mapsparse
