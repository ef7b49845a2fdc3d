#include "mapsparse/binary_matrix.hpp"

#include <algorithm>
#include <string>

#include "mapsparse/error.hpp"

namespace mapsparse {

BinaryMatrix::BinaryMatrix(std::size_t rows, std::size_t cols)
    : cols_(cols), row_ptr_(rows + 1, 0) {}

BinaryMatrix BinaryMatrix::fromRows(
    std::size_t cols, std::vector<std::vector<std::uint32_t>> rows) {
  BinaryMatrix m(0, cols);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  m.col_idx_.reserve(total);
  m.row_ptr_.reserve(rows.size() + 1);
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    m.appendRow(r);
  }
  return m;
}

void BinaryMatrix::appendRow(std::span<const std::uint32_t> columns) {
  std::uint32_t prev = 0;
  bool first = true;
  for (std::uint32_t c : columns) {
    if (c >= cols_) {
      throw ContractViolation("column " + std::to_string(c) +
                              " out of range for matrix with " +
                              std::to_string(cols_) + " columns");
    }
    if (!first && c <= prev) {
      throw ContractViolation("row columns must be strictly increasing");
    }
    prev = c;
    first = false;
    col_idx_.push_back(c);
  }
  row_ptr_.push_back(col_idx_.size());
}

bool BinaryMatrix::at(std::size_t r, std::size_t c) const {
  auto cols = row(r);
  return std::binary_search(cols.begin(), cols.end(),
                            static_cast<std::uint32_t>(c));
}

std::vector<std::uint32_t> BinaryMatrix::columnCounts() const {
  std::vector<std::uint32_t> counts(cols_, 0);
  for (std::uint32_t c : col_idx_) ++counts[c];
  return counts;
}

BinaryMatrix BinaryMatrix::transpose() const {
  BinaryMatrix t;
  t.cols_ = rows();
  t.row_ptr_.assign(cols_ + 1, 0);
  for (std::uint32_t c : col_idx_) ++t.row_ptr_[c + 1];
  for (std::size_t j = 0; j < cols_; ++j) t.row_ptr_[j + 1] += t.row_ptr_[j];
  t.col_idx_.resize(col_idx_.size());
  std::vector<std::size_t> cursor(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  // Row-major traversal keeps each transposed row sorted.
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::uint32_t c : row(r)) {
      t.col_idx_[cursor[c]++] = static_cast<std::uint32_t>(r);
    }
  }
  return t;
}

std::vector<std::int32_t> BinaryMatrix::multiply(
    std::span<const std::uint8_t> x) const {
  if (x.size() != cols_) {
    throw ContractViolation("selection length " + std::to_string(x.size()) +
                            " does not match matrix width " +
                            std::to_string(cols_));
  }
  std::vector<std::int32_t> y(rows(), 0);
  for (std::size_t r = 0; r < rows(); ++r) {
    std::int32_t s = 0;
    for (std::uint32_t c : row(r)) s += x[c] ? 1 : 0;
    y[r] = s;
  }
  return y;
}

BinaryMatrix BinaryMatrix::maskColumns(std::span<const std::uint8_t> keep) const {
  BinaryMatrix out(0, cols_);
  std::vector<std::uint32_t> buf;
  for (std::size_t r = 0; r < rows(); ++r) {
    buf.clear();
    for (std::uint32_t c : row(r)) {
      if (keep[c]) buf.push_back(c);
    }
    out.appendRow(buf);
  }
  return out;
}

}  // namespace mapsparse
