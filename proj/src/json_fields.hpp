#pragma once

// Field accessors that turn malformed JSON records into ParseErrors naming
// the offending record and field.

#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "mapsparse/error.hpp"

namespace mapsparse::detail::json_fields {

using nlohmann::json;

inline const json& field(const json& rec, const char* name, const std::string& where) {
  if (!rec.is_object()) throw ParseError(where + ": expected an object");
  auto it = rec.find(name);
  if (it == rec.end()) {
    throw ParseError(where + "." + name + ": missing field");
  }
  return *it;
}

inline double number(const json& rec, const char* name, const std::string& where) {
  const json& v = field(rec, name, where);
  if (!v.is_number()) throw ParseError(where + "." + name + ": expected a number");
  return v.get<double>();
}

inline std::int64_t integer(const json& rec, const char* name,
                     const std::string& where) {
  const json& v = field(rec, name, where);
  if (!v.is_number_integer()) {
    throw ParseError(where + "." + name + ": expected an integer");
  }
  return v.get<std::int64_t>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& rec, const char* name,
                                const std::string& where) {
  const json& v = field(rec, name, where);
  if (!v.is_array() || v.size() != N) {
    throw ParseError(where + "." + name + ": expected an array of " +
                     std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!v[i].is_number()) {
      throw ParseError(where + "." + name + "[" + std::to_string(i) +
                       "]: expected a number");
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

inline const json& array(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw ParseError(std::string(name) + ": missing array");
  if (!it->is_array()) throw ParseError(std::string(name) + ": expected an array");
  return *it;
}

inline std::string at(const char* name, std::size_t i) {
  return std::string(name) + "[" + std::to_string(i) + "]";
}

}  // namespace mapsparse::detail::json_fields
