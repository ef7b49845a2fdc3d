#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace mapsparse::detail {

// Shortest decimal that round-trips to the same double. Negative zero is
// written as 0 so text output is stable across a parse/serialize cycle.
inline std::string formatDouble(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf, res.ptr);
}

inline void appendDouble(std::string& out, double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace mapsparse::detail
