#include "cover_lp.hpp"

#include <algorithm>
#include <unordered_map>

namespace mapsparse::detail {
namespace {

struct RowKey {
  std::span<const std::uint32_t> cols;
  std::int32_t rhs;
  bool operator==(const RowKey& o) const {
    return rhs == o.rhs && std::equal(cols.begin(), cols.end(), o.cols.begin(),
                                      o.cols.end());
  }
};

struct RowKeyHash {
  std::size_t operator()(const RowKey& k) const {
    std::size_t h = std::hash<std::int32_t>()(k.rhs) ^ (k.cols.size() << 20);
    for (std::uint32_t c : k.cols) {
      h ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

CoverLp buildCoverLp(const SparsificationProblem& problem) {
  CoverLp lp;
  lp.n = problem.n;
  lp.cost = problem.weight;
  lp.rows = BinaryMatrix(0, problem.n);
  std::unordered_map<RowKey, std::size_t, RowKeyHash> seen;
  for (const auto& blk : problem.blocks) {
    for (std::size_t r = 0; r < blk.matrix.rows(); ++r) {
      const auto cols = blk.matrix.row(r);
      const double rhs = blk.rhs[r];
      if (blk.penalty == 0.0) continue;
      if (cols.empty()) {
        lp.constant += blk.penalty * rhs;
        continue;
      }
      RowKey key{cols, blk.rhs[r]};
      auto [it, inserted] = seen.try_emplace(key, lp.rhs.size());
      if (inserted) {
        lp.rows.appendRow(cols);
        lp.rhs.push_back(rhs);
        lp.penalty.push_back(blk.penalty);
      } else {
        lp.penalty[it->second] += blk.penalty;
      }
    }
  }
  lp.cols = lp.rows.transpose();
  return lp;
}

double primalValue(const CoverLp& lp, std::span<const double> x) {
  double v = lp.constant;
  for (std::size_t j = 0; j < lp.n; ++j) v += lp.cost[j] * x[j];
  for (std::size_t r = 0; r < lp.numRows(); ++r) {
    double act = 0.0;
    for (std::uint32_t c : lp.rows.row(r)) act += x[c];
    v += lp.penalty[r] * std::max(0.0, lp.rhs[r] - act);
  }
  return v;
}

double dualValue(const CoverLp& lp, std::span<const double> y,
                 std::span<const double> lo, std::span<const double> hi) {
  double v = lp.constant;
  for (std::size_t r = 0; r < lp.numRows(); ++r) v += lp.rhs[r] * y[r];
  for (std::size_t j = 0; j < lp.n; ++j) {
    double mty = 0.0;
    for (std::uint32_t r : lp.cols.row(j)) mty += y[r];
    const double d = lp.cost[j] - mty;
    v += d >= 0.0 ? d * lo[j] : d * hi[j];
  }
  return v;
}

}  // namespace mapsparse::detail
