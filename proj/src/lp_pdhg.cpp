// Restarted, diagonally preconditioned primal-dual hybrid gradient for
//   min_{lo<=x<=hi} max_{0<=y<=pen}  c.x + y.(rhs - M x).
// Both the primal objective P(x) and the Lagrangian dual D(y) are exact and
// cheap to evaluate, so progress is measured with the true duality gap.

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cover_lp.hpp"
#include "mapsparse/error.hpp"

namespace mapsparse::detail {
namespace {

constexpr double kStepSafety = 0.99;
constexpr double kSufficientDecay = 0.2;
constexpr double kNecessaryDecay = 0.8;
constexpr double kArtificialRestart = 0.36;

void multiply(const BinaryMatrix& m, std::span<const double> v,
              std::vector<double>& out) {
  out.assign(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (std::uint32_t c : m.row(r)) s += v[c];
    out[r] = s;
  }
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace

LpRun solvePdhg(const CoverLp& lp, std::span<const double> lo,
                std::span<const double> hi, const PdhgOptions& options,
                const LpRun* warm_start) {
  const std::size_t n = lp.n;
  const std::size_t m = lp.numRows();
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> x(n), y(m, 0.0);
  if (warm_start != nullptr && warm_start->x.size() == n &&
      warm_start->y.size() == m) {
    x = warm_start->x;
    y = warm_start->y;
  } else {
    for (std::size_t j = 0; j < n; ++j) x[j] = lo[j];
  }
  for (std::size_t j = 0; j < n; ++j) x[j] = std::clamp(x[j], lo[j], hi[j]);
  for (std::size_t r = 0; r < m; ++r) y[r] = std::clamp(y[r], 0.0, lp.penalty[r]);

  std::vector<double> col_count(n), row_count(m);
  for (std::size_t j = 0; j < n; ++j) {
    col_count[j] = static_cast<double>(lp.cols.rowCount(j));
  }
  for (std::size_t r = 0; r < m; ++r) {
    row_count[r] = static_cast<double>(lp.rows.rowCount(r));
  }

  double omega = 1.0;
  {
    const double cn = norm(lp.cost);
    const double bn = norm(lp.rhs);
    if (cn > 0.0 && bn > 0.0) omega = cn / bn;
  }
  std::vector<double> tau(n), sigma(m);
  auto setSteps = [&] {
    for (std::size_t j = 0; j < n; ++j) {
      tau[j] = col_count[j] > 0 ? kStepSafety / (omega * col_count[j]) : 0.0;
    }
    for (std::size_t r = 0; r < m; ++r) {
      sigma[r] = kStepSafety * omega / row_count[r];
    }
  };
  setSteps();

  LpRun best;
  best.x = x;
  best.y = y;
  best.primal = primalValue(lp, x);
  best.dual = dualValue(lp, y, lo, hi);

  auto gapOf = [](double p, double d) {
    return std::max(0.0, p - d) / std::max(1.0, std::abs(p));
  };
  auto consider = [&](std::span<const double> cx, std::span<const double> cy,
                      double& gap_out) {
    const double p = primalValue(lp, cx);
    const double d = dualValue(lp, cy, lo, hi);
    if (p < best.primal) {
      best.primal = p;
      best.x.assign(cx.begin(), cx.end());
    }
    if (d > best.dual) {
      best.dual = d;
      best.y.assign(cy.begin(), cy.end());
    }
    gap_out = gapOf(p, d);
  };

  std::vector<double> mty, mx, x_bar(n);
  std::vector<double> sum_x(n, 0.0), sum_y(m, 0.0);
  std::vector<double> avg_x(n), avg_y(m);
  std::vector<double> restart_x = x, restart_y = y;
  std::size_t since_restart = 0;
  double restart_gap = gapOf(best.primal, best.dual);
  double last_candidate_gap = restart_gap;
  std::size_t iter = 0;

  while (gapOf(best.primal, best.dual) > options.tolerance &&
         iter < options.max_iterations) {
    // x step
    multiply(lp.cols, y, mty);
    for (std::size_t j = 0; j < n; ++j) {
      const double nx = std::clamp(x[j] - tau[j] * (lp.cost[j] - mty[j]), lo[j], hi[j]);
      x_bar[j] = 2.0 * nx - x[j];
      x[j] = nx;
    }
    // y step at the extrapolated point
    multiply(lp.rows, x_bar, mx);
    for (std::size_t r = 0; r < m; ++r) {
      y[r] = std::clamp(y[r] + sigma[r] * (lp.rhs[r] - mx[r]), 0.0, lp.penalty[r]);
    }
    for (std::size_t j = 0; j < n; ++j) sum_x[j] += x[j];
    for (std::size_t r = 0; r < m; ++r) sum_y[r] += y[r];
    ++since_restart;
    ++iter;

    if (iter % options.check_every != 0) continue;

    const double inv = 1.0 / static_cast<double>(since_restart);
    for (std::size_t j = 0; j < n; ++j) avg_x[j] = sum_x[j] * inv;
    for (std::size_t r = 0; r < m; ++r) avg_y[r] = sum_y[r] * inv;
    double gap_cur = 0.0, gap_avg = 0.0;
    consider(x, y, gap_cur);
    consider(avg_x, avg_y, gap_avg);

    const bool use_avg = gap_avg < gap_cur;
    const double cand_gap = use_avg ? gap_avg : gap_cur;
    const bool restart =
        cand_gap <= kSufficientDecay * restart_gap ||
        (cand_gap <= kNecessaryDecay * restart_gap && cand_gap > last_candidate_gap) ||
        static_cast<double>(since_restart) >= kArtificialRestart * static_cast<double>(iter);
    last_candidate_gap = cand_gap;
    if (restart) {
      if (use_avg) {
        x = avg_x;
        y = avg_y;
      }
      const double dx = distance(x, restart_x);
      const double dy = distance(y, restart_y);
      if (dx > 1e-10 && dy > 1e-10) {
        omega = std::exp(0.5 * std::log(dy / dx) + 0.5 * std::log(omega));
        setSteps();
      }
      restart_x = x;
      restart_y = y;
      restart_gap = cand_gap;
      since_restart = 0;
      std::fill(sum_x.begin(), sum_x.end(), 0.0);
      std::fill(sum_y.begin(), sum_y.end(), 0.0);
    }

    const double elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
    if (elapsed > options.time_limit_s) break;
  }

  if (!std::isfinite(best.primal) || !std::isfinite(best.dual)) {
    throw SolverError("first-order relaxation produced non-finite values after " +
                      std::to_string(iter) + " iterations");
  }
  best.iterations = iter;
  best.converged = gapOf(best.primal, best.dual) <= options.tolerance;
  return best;
}

}  // namespace mapsparse::detail
