#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mapsparse/binary_matrix.hpp"
#include "mapsparse/problem.hpp"

namespace mapsparse::detail {

// Incrementally maintained row activities for a 0/1 selection, giving O(col)
// marginal objective changes for adding or dropping one landmark.
class ActivityTracker {
 public:
  explicit ActivityTracker(const SparsificationProblem& problem)
      : weight_(problem.weight), x_(problem.n, 0) {
    std::vector<std::vector<std::uint32_t>> rows;
    for (const auto& blk : problem.blocks) {
      for (std::size_t r = 0; r < blk.matrix.rows(); ++r) {
        if (blk.penalty > 0.0) {
          const auto cols = blk.matrix.row(r);
          rows.emplace_back(cols.begin(), cols.end());
          rhs_.push_back(blk.rhs[r]);
          penalty_.push_back(blk.penalty);
          objective_ += blk.penalty * blk.rhs[r];
        }
      }
    }
    by_column_ = BinaryMatrix::fromRows(problem.n, std::move(rows)).transpose();
    activity_.assign(rhs_.size(), 0);
  }

  // Objective change if j were added (j must be unselected).
  double addDelta(std::size_t j) const {
    double d = weight_[j];
    for (std::uint32_t r : by_column_.row(j)) {
      if (activity_[r] < rhs_[r]) d -= penalty_[r];
    }
    return d;
  }

  // Objective change if j were removed (j must be selected).
  double dropDelta(std::size_t j) const {
    double d = -weight_[j];
    for (std::uint32_t r : by_column_.row(j)) {
      if (activity_[r] <= rhs_[r]) d += penalty_[r];
    }
    return d;
  }

  void add(std::size_t j) {
    objective_ += addDelta(j);
    x_[j] = 1;
    for (std::uint32_t r : by_column_.row(j)) ++activity_[r];
  }

  void drop(std::size_t j) {
    objective_ += dropDelta(j);
    x_[j] = 0;
    for (std::uint32_t r : by_column_.row(j)) --activity_[r];
  }

  void flip(std::size_t j) { x_[j] ? drop(j) : add(j); }

  bool selected(std::size_t j) const { return x_[j] != 0; }
  const std::vector<std::uint8_t>& selection() const { return x_; }
  // Accumulated incrementally; recompute with objectiveValue when exactness
  // matters.
  double objective() const { return objective_; }

 private:
  std::span<const double> weight_;
  std::vector<std::uint8_t> x_;
  BinaryMatrix by_column_;
  std::vector<std::int32_t> rhs_;
  std::vector<double> penalty_;
  std::vector<std::int32_t> activity_;
  double objective_ = 0.0;
};

}  // namespace mapsparse::detail
