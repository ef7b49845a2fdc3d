// Bounded-variable primal simplex with an explicit dense basis inverse.
//
// Columns: x_j in [lo_j, hi_j] (cost c_j), surplus-absorbing slack s_r >= 0
// (cost pen_r, column +e_r) and excess t_r >= 0 (cost 0, column -e_r):
//   M x + s - t = rhs.
// The all-slack basis is feasible from the start, so no phase one is needed.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cover_lp.hpp"
#include "mapsparse/error.hpp"

namespace mapsparse::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr std::size_t kRefactorEvery = 100;
constexpr int kDegenerateBeforeBland = 50;

enum class VarState : std::uint8_t { kBasic, kLower, kUpper };

class DenseSimplex {
 public:
  DenseSimplex(const CoverLp& lp, std::span<const double> lo,
               std::span<const double> hi)
      : lp_(lp), n_(lp.n), m_(lp.numRows()), lo_(lo), hi_(hi) {
    const std::size_t total = n_ + 2 * m_;
    state_.assign(total, VarState::kLower);
    value_.assign(total, 0.0);
    head_.assign(m_, 0);
    pos_.assign(total, -1);
    for (std::size_t j = 0; j < n_; ++j) value_[j] = lo_[j];
    binv_ = Eigen::MatrixXd::Zero(m_, m_);
    for (std::size_t r = 0; r < m_; ++r) {
      double act = 0.0;
      for (std::uint32_t c : lp_.rows.row(r)) act += lo_[c];
      const double res = lp_.rhs[r] - act;
      const std::size_t var = res >= 0.0 ? sVar(r) : tVar(r);
      head_[r] = var;
      pos_[var] = static_cast<std::int64_t>(r);
      state_[var] = VarState::kBasic;
      value_[var] = std::abs(res);
      binv_(r, r) = res >= 0.0 ? 1.0 : -1.0;
    }
  }

  LpRun run(std::size_t max_iterations) {
    if (max_iterations == 0) max_iterations = 50 * (n_ + 2 * m_) + 10000;
    std::size_t iter = 0;
    std::size_t since_refactor = 0;
    int degenerate = 0;
    bool bland = false;
    bool duals_valid = false;
    while (true) {
      if (iter >= max_iterations) {
        std::ostringstream os;
        os << "dense simplex hit its iteration limit (" << max_iterations
           << " iterations, " << m_ << " rows, " << n_ << " columns)";
        throw SolverError(os.str());
      }
      if (!duals_valid) {
        computeDuals();
        duals_valid = true;
      }
      const std::int64_t q = price(bland);
      if (q < 0) break;
      ++iter;
      const std::size_t entering = static_cast<std::size_t>(q);
      const double dir = state_[entering] == VarState::kLower ? 1.0 : -1.0;
      computeColumn(entering);

      // Ratio test over basic variables and the entering variable's own range.
      double theta = upper(entering) - lower(entering);
      std::int64_t leave = -1;
      double best_pivot = 0.0;
      for (std::size_t p = 0; p < m_; ++p) {
        const double rate = -dir * w_[p];
        const std::size_t var = head_[p];
        double t;
        if (rate < -kPivotTol) {
          t = (value_[var] - lower(var)) / -rate;
        } else if (rate > kPivotTol && upper(var) < kInf) {
          t = (upper(var) - value_[var]) / rate;
        } else {
          continue;
        }
        t = std::max(t, 0.0);
        const bool better =
            t < theta - 1e-12 ||
            (leave >= 0 && t <= theta + 1e-12 &&
             (bland ? var < head_[static_cast<std::size_t>(leave)]
                    : std::abs(w_[p]) > best_pivot));
        if (better || (leave < 0 && t <= theta - 1e-12)) {
          theta = t;
          leave = static_cast<std::int64_t>(p);
          best_pivot = std::abs(w_[p]);
        }
      }
      if (!std::isfinite(theta)) {
        throw SolverError("dense simplex found an unbounded ray, which the "
                          "covering relaxation cannot have (numerical failure "
                          "after " + std::to_string(iter) + " iterations)");
      }

      for (std::size_t p = 0; p < m_; ++p) {
        value_[head_[p]] += -dir * w_[p] * theta;
      }
      value_[entering] += dir * theta;

      if (theta < 1e-12) {
        if (++degenerate > kDegenerateBeforeBland) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }

      if (leave < 0) {
        // Bound flip; the basis (and the duals) stay the same.
        state_[entering] =
            dir > 0 ? VarState::kUpper : VarState::kLower;
        value_[entering] = dir > 0 ? upper(entering) : lower(entering);
        continue;
      }

      const std::size_t p = static_cast<std::size_t>(leave);
      const std::size_t leaving = head_[p];
      const double rate = -dir * w_[p];
      state_[leaving] = rate < 0 ? VarState::kLower : VarState::kUpper;
      value_[leaving] = rate < 0 ? lower(leaving) : upper(leaving);
      pos_[leaving] = -1;
      head_[p] = entering;
      pos_[entering] = static_cast<std::int64_t>(p);
      state_[entering] = VarState::kBasic;
      pivot(p);
      duals_valid = false;
      if (++since_refactor >= kRefactorEvery) {
        refactor();
        since_refactor = 0;
      }
    }
    refactor();
    computeDuals();

    LpRun out;
    out.iterations = iter;
    out.converged = true;
    out.x.assign(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      out.x[j] = std::clamp(out.x[j], lo_[j], hi_[j]);
    }
    out.y.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      out.y[r] = std::clamp(y_[r], 0.0, lp_.penalty[r]);
    }
    return out;
  }

 private:
  std::size_t sVar(std::size_t r) const { return n_ + r; }
  std::size_t tVar(std::size_t r) const { return n_ + m_ + r; }

  double lower(std::size_t var) const { return var < n_ ? lo_[var] : 0.0; }
  double upper(std::size_t var) const { return var < n_ ? hi_[var] : kInf; }
  double cost(std::size_t var) const {
    if (var < n_) return lp_.cost[var];
    if (var < n_ + m_) return lp_.penalty[var - n_];
    return 0.0;
  }

  void computeDuals() {
    y_.assign(m_, 0.0);
    for (std::size_t p = 0; p < m_; ++p) {
      const double cb = cost(head_[p]);
      if (cb == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) y_[i] += cb * binv_(p, i);
    }
  }

  double reducedCost(std::size_t var) const {
    if (var < n_) {
      double d = lp_.cost[var];
      for (std::uint32_t r : lp_.cols.row(var)) d -= y_[r];
      return d;
    }
    if (var < n_ + m_) return lp_.penalty[var - n_] - y_[var - n_];
    return y_[var - n_ - m_];
  }

  // Entering variable, or -1 at optimality.
  std::int64_t price(bool bland) const {
    std::int64_t best = -1;
    double best_score = 0.0;
    const std::size_t total = n_ + 2 * m_;
    for (std::size_t var = 0; var < total; ++var) {
      const VarState st = state_[var];
      if (st == VarState::kBasic) continue;
      if (upper(var) - lower(var) <= 0.0) continue;
      const double d = reducedCost(var);
      double score = 0.0;
      if (st == VarState::kLower && d < -kCostTol) score = -d;
      if (st == VarState::kUpper && d > kCostTol) score = d;
      if (score <= 0.0) continue;
      if (bland) return static_cast<std::int64_t>(var);
      if (score > best_score) {
        best_score = score;
        best = static_cast<std::int64_t>(var);
      }
    }
    return best;
  }

  void computeColumn(std::size_t var) {
    w_.assign(m_, 0.0);
    if (var < n_) {
      for (std::uint32_t r : lp_.cols.row(var)) {
        for (std::size_t i = 0; i < m_; ++i) w_[i] += binv_(i, r);
      }
    } else if (var < n_ + m_) {
      const std::size_t r = var - n_;
      for (std::size_t i = 0; i < m_; ++i) w_[i] = binv_(i, r);
    } else {
      const std::size_t r = var - n_ - m_;
      for (std::size_t i = 0; i < m_; ++i) w_[i] = -binv_(i, r);
    }
  }

  void pivot(std::size_t p) {
    const double piv = w_[p];
    binv_.row(p) /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == p || w_[i] == 0.0) continue;
      binv_.row(i) -= w_[i] * binv_.row(p);
    }
  }

  void refactor() {
    if (m_ == 0) return;
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m_, m_);
    for (std::size_t p = 0; p < m_; ++p) {
      const std::size_t var = head_[p];
      if (var < n_) {
        for (std::uint32_t r : lp_.cols.row(var)) basis(r, p) = 1.0;
      } else if (var < n_ + m_) {
        basis(var - n_, p) = 1.0;
      } else {
        basis(var - n_ - m_, p) = -1.0;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
    binv_ = lu.inverse();
    // Recompute basic values from the nonbasic ones.
    Eigen::VectorXd rhs(m_);
    for (std::size_t r = 0; r < m_; ++r) rhs[r] = lp_.rhs[r];
    for (std::size_t j = 0; j < n_; ++j) {
      if (state_[j] == VarState::kBasic || value_[j] == 0.0) continue;
      for (std::uint32_t r : lp_.cols.row(j)) rhs[r] -= value_[j];
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (state_[sVar(r)] != VarState::kBasic) rhs[r] -= value_[sVar(r)];
      if (state_[tVar(r)] != VarState::kBasic) rhs[r] += value_[tVar(r)];
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (std::size_t p = 0; p < m_; ++p) value_[head_[p]] = xb[p];
  }

  const CoverLp& lp_;
  std::size_t n_;
  std::size_t m_;
  std::span<const double> lo_;
  std::span<const double> hi_;
  std::vector<VarState> state_;
  std::vector<double> value_;
  std::vector<std::size_t> head_;
  std::vector<std::int64_t> pos_;
  Eigen::MatrixXd binv_;
  std::vector<double> y_;
  std::vector<double> w_;
};

}  // namespace

LpRun solveDenseSimplex(const CoverLp& lp, std::span<const double> lo,
                        std::span<const double> hi,
                        const SimplexOptions& options) {
  DenseSimplex simplex(lp, lo, hi);
  LpRun run = simplex.run(options.max_iterations);
  run.primal = primalValue(lp, run.x);
  run.dual = dualValue(lp, run.y, lo, hi);
  return run;
}

}  // namespace mapsparse::detail
