#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mapsparse::detail {

// Splits [0, n) into at most `workers` contiguous chunks and runs
// fn(begin, end, chunk) on each. Chunk boundaries depend only on n and
// workers, so callers that write per-chunk results get stable output.
template <typename Fn>
void parallelChunks(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n));
  if (w <= 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  const std::size_t step = (n + w - 1) / w;
  for (std::size_t c = 0; c < w; ++c) {
    const std::size_t b = c * step;
    const std::size_t e = std::min(n, b + step);
    threads.emplace_back([&, b, e, c] {
      try {
        fn(b, e, c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

inline std::size_t chunkCount(std::size_t n, int workers) {
  return std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n));
}

}  // namespace mapsparse::detail
