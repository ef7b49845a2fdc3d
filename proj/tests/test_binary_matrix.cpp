#include <doctest.h>

#include <random>

#include "mapsparse/binary_matrix.hpp"
#include "mapsparse/error.hpp"

using mapsparse::BinaryMatrix;

TEST_CASE("rows are sorted and deduplicated") {
  const auto m = BinaryMatrix::fromRows(5, {{3, 1, 3}, {}, {4, 0}});
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 5);
  CHECK(m.nnz() == 4);
  CHECK(std::vector<std::uint32_t>(m.row(0).begin(), m.row(0).end()) ==
        std::vector<std::uint32_t>{1, 3});
  CHECK(m.rowCount(1) == 0);
  CHECK(m.at(2, 0));
  CHECK_FALSE(m.at(2, 1));
}

TEST_CASE("out-of-range column is rejected") {
  BinaryMatrix m(0, 3);
  const std::uint32_t bad[] = {3};
  CHECK_THROWS_AS(m.appendRow(bad), mapsparse::ContractViolation);
}

TEST_CASE("multiply, transpose and column counts agree with a dense oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 1 + rng() % 9, cols = 1 + rng() % 12;
    std::vector<std::vector<int>> dense(rows, std::vector<int>(cols, 0));
    std::vector<std::vector<std::uint32_t>> sparse(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (rng() % 3 == 0) {
          dense[r][c] = 1;
          sparse[r].push_back(static_cast<std::uint32_t>(c));
        }
      }
    }
    const auto m = BinaryMatrix::fromRows(cols, sparse);
    std::vector<std::uint8_t> x(cols);
    for (auto& v : x) v = rng() & 1;

    const auto y = m.multiply(x);
    const auto counts = m.columnCounts();
    const auto t = m.transpose();
    REQUIRE(t.rows() == cols);
    for (std::size_t r = 0; r < rows; ++r) {
      int expect = 0;
      for (std::size_t c = 0; c < cols; ++c) expect += dense[r][c] * x[c];
      CHECK(y[r] == expect);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      std::uint32_t expect = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        expect += dense[r][c];
        CHECK(t.at(c, r) == (dense[r][c] == 1));
      }
      CHECK(counts[c] == expect);
    }
    CHECK(t.transpose() == m);

    const auto masked = m.maskColumns(x);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        CHECK(masked.at(r, c) == (dense[r][c] == 1 && x[c] == 1));
      }
    }
  }
}
