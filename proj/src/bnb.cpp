// Best-first branch-and-bound over the continuous relaxation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <queue>
#include <thread>

#include "cover_lp.hpp"
#include "mapsparse/error.hpp"
#include "mapsparse/solver.hpp"

namespace mapsparse {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kFractional = 1e-6;
constexpr double kOptimalGap = 1e-6;

struct Fix {
  std::uint32_t var;
  std::uint8_t value;
};

struct Node {
  double bound = 0.0;
  std::uint64_t seq = 0;
  std::vector<Fix> fixes;
  std::shared_ptr<const detail::LpRun> warm;  // first-order engine only
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

enum class StopReason { kNone, kNodes, kTime, kGap };

class BranchAndBound {
 public:
  BranchAndBound(const SparsificationProblem& problem, const SolveLimits& limits)
      : problem_(problem),
        limits_(limits),
        lp_(detail::buildCoverLp(problem)),
        start_(Clock::now()) {
    if (!problem.blocks.empty()) {
      branch_weight_ = problem.blocks.front().matrix.columnCounts();
    } else {
      branch_weight_.assign(problem.n, 0);
    }
  }

  Solution run() {
    // Root relaxation and initial incumbent.
    const std::vector<double> lo(problem_.n, 0.0), hi(problem_.n, 1.0);
    LpEngine engine = LpEngine::kSimplex;
    detail::LpRun root = detail::solveCoverLp(lp_, lo, hi, limits_.lp, &engine,
                                              nullptr, remaining());
    use_warm_start_ = engine == LpEngine::kPdhg;
    RelaxedSolution relaxed;
    relaxed.x_frac = root.x;
    relaxed.primal = root.primal;
    relaxed.bound = std::min(root.dual, root.primal);
    root_bound_ = relaxed.bound;
    incumbent_ = roundRelaxation(problem_, relaxed);

    if (limits_.node_limit == 0 || remaining() <= 0.0) {
      return finish(StopReason::kNodes, /*processed_root=*/false);
    }
    processed_ = 1;
    expand(Node{}, root);

    if (limits_.workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < limits_.workers; ++w) pool.emplace_back([this] { worker(); });
      for (auto& t : pool) t.join();
    }
    if (failure_) std::rethrow_exception(failure_);
    return finish(stop_, true);
  }

 private:
  double remaining() const {
    const double elapsed =
        std::chrono::duration<double>(Clock::now() - start_).count();
    return limits_.time_limit_s - elapsed;
  }

  double pruneLevel() const {
    return incumbent_.objective - 1e-9 * std::max(1.0, std::abs(incumbent_.objective));
  }

  double openLowerBound() const {
    double lb = std::min(unresolved_floor_, incumbent_.objective);
    if (!open_.empty()) lb = std::min(lb, open_.top().bound);
    return std::max(lb, root_bound_);
  }

  // Called with the lock held (or single-threaded). Updates the incumbent and
  // pushes children of `node` given its relaxation result.
  void expand(const Node& node, const detail::LpRun& run) {
    const double bound = std::max(node.bound, std::min(run.dual, run.primal));
    RelaxedSolution relaxed;
    relaxed.x_frac = run.x;
    relaxed.bound = bound;
    Solution cand = roundRelaxation(problem_, relaxed);
    if (cand.objective < incumbent_.objective) incumbent_ = std::move(cand);
    if (bound >= pruneLevel()) return;

    std::vector<std::uint8_t> fixed(problem_.n, 0);
    for (const Fix& f : node.fixes) fixed[f.var] = 1;
    std::int64_t pick = -1;
    double pick_frac = kFractional;
    for (std::size_t j = 0; j < problem_.n; ++j) {
      if (fixed[j]) continue;
      const double f = std::min(run.x[j], 1.0 - run.x[j]);
      if (f > pick_frac + 1e-12 ||
          (pick >= 0 && std::abs(f - pick_frac) <= 1e-12 &&
           branch_weight_[j] > branch_weight_[static_cast<std::size_t>(pick)])) {
        pick = static_cast<std::int64_t>(j);
        pick_frac = f;
      }
    }
    if (pick < 0) {
      // Integral relaxation that still does not meet the incumbent: only
      // possible with an inexact engine. Keep its bound as a floor.
      unresolved_floor_ = std::min(unresolved_floor_, bound);
      return;
    }
    const auto var = static_cast<std::uint32_t>(pick);
    std::shared_ptr<const detail::LpRun> warm;
    if (use_warm_start_) warm = std::make_shared<detail::LpRun>(run);
    const std::uint8_t first = run.x[var] >= 0.5 ? 1 : 0;
    for (std::uint8_t value : {first, static_cast<std::uint8_t>(1 - first)}) {
      Node child;
      child.bound = bound;
      child.seq = next_seq_++;
      child.fixes = node.fixes;
      child.fixes.push_back({var, value});
      child.warm = warm;
      open_.push(std::move(child));
    }
  }

  void worker() {
    std::unique_lock lock(mu_);
    while (true) {
      if (stop_ != StopReason::kNone || failure_) break;
      while (!open_.empty() && open_.top().bound >= pruneLevel()) open_.pop();
      if (open_.empty()) {
        if (active_ == 0) break;
        cv_.wait(lock);
        continue;
      }
      if (processed_ >= limits_.node_limit) { stop_ = StopReason::kNodes; break; }
      if (remaining() <= 0.0) { stop_ = StopReason::kTime; break; }
      if (limits_.gap_limit > 0.0 &&
          relativeGap(incumbent_.objective, openLowerBound()) <= limits_.gap_limit) {
        stop_ = StopReason::kGap;
        break;
      }
      Node node = open_.top();
      open_.pop();
      ++active_;
      lock.unlock();

      detail::LpRun run;
      std::exception_ptr err;
      try {
        std::vector<double> lo(problem_.n, 0.0), hi(problem_.n, 1.0);
        for (const Fix& f : node.fixes) lo[f.var] = hi[f.var] = f.value;
        run = detail::solveCoverLp(lp_, lo, hi, limits_.lp, nullptr,
                                   node.warm.get(), std::max(remaining(), 0.0));
      } catch (...) {
        err = std::current_exception();
      }

      lock.lock();
      --active_;
      if (err) {
        failure_ = err;
      } else {
        ++processed_;
        expand(node, run);
      }
      cv_.notify_all();
    }
    cv_.notify_all();
  }

  Solution finish(StopReason reason, bool processed_root) {
    double bound = processed_root ? openLowerBound() : root_bound_;
    if (reason == StopReason::kNone && unresolved_floor_ >= incumbent_.objective) {
      bound = incumbent_.objective;
    }
    Solution s = makeSolution(problem_, incumbent_.x, bound, SolveStatus::kHeuristic);
    s.nodes = processed_;
    if (!processed_root) {
      s.status = SolveStatus::kHeuristic;
    } else if (s.gap <= kOptimalGap) {
      s.status = SolveStatus::kOptimal;
    } else if (reason == StopReason::kGap) {
      s.status = SolveStatus::kGapLimit;
    } else if (reason == StopReason::kTime) {
      s.status = SolveStatus::kTimeLimit;
    } else if (reason == StopReason::kNodes) {
      s.status = SolveStatus::kNodeLimit;
    } else {
      s.status = SolveStatus::kHeuristic;
    }
    return s;
  }

  const SparsificationProblem& problem_;
  const SolveLimits& limits_;
  const detail::CoverLp lp_;
  const Clock::time_point start_;
  std::vector<std::uint32_t> branch_weight_;
  bool use_warm_start_ = false;

  std::mutex mu_;
  std::condition_variable cv_;
  std::priority_queue<Node, std::vector<Node>, WorseNode> open_;
  Solution incumbent_;
  double root_bound_ = 0.0;
  double unresolved_floor_ = std::numeric_limits<double>::infinity();
  std::uint64_t next_seq_ = 0;
  std::size_t processed_ = 0;
  int active_ = 0;
  StopReason stop_ = StopReason::kNone;
  std::exception_ptr failure_;
};

}  // namespace

Solution solveBnb(const SparsificationProblem& problem, const SolveLimits& limits) {
  problem.validate();
  limits.validate();
  BranchAndBound bnb(problem, limits);
  return bnb.run();
}

}  // namespace mapsparse
