#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mapsparse {

// Sparse 0/1 matrix in compressed-row form. Column indices inside a row are
// sorted and unique. Only the sparsity pattern is stored.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols);

  // Rows are sorted and deduplicated on insertion.
  static BinaryMatrix fromRows(std::size_t cols,
                               std::vector<std::vector<std::uint32_t>> rows);

  // Appends one row. Throws ContractViolation on an out-of-range column.
  void appendRow(std::span<const std::uint32_t> columns);

  std::size_t rows() const noexcept { return row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return col_idx_.size(); }

  std::span<const std::uint32_t> row(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::size_t rowCount(std::size_t r) const {
    return row_ptr_[r + 1] - row_ptr_[r];
  }

  bool at(std::size_t r, std::size_t c) const;

  // Per-column nonzero counts (length cols()).
  std::vector<std::uint32_t> columnCounts() const;

  // Transposed pattern; row j of the result lists the rows containing j.
  BinaryMatrix transpose() const;

  // y = M x for a 0/1 selection vector; entries are exact integer counts.
  std::vector<std::int32_t> multiply(std::span<const std::uint8_t> x) const;

  // Restrict to the given column mask (columns keep their indices).
  BinaryMatrix maskColumns(std::span<const std::uint8_t> keep) const;

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
};

}  // namespace mapsparse
