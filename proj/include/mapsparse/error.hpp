#pragma once

#include <stdexcept>
#include <string>

namespace mapsparse {

// Broad failure classes. The C API and the CLI map these onto status and
// exit codes (usage = 2, input = 3, solver = 4).
enum class ErrorKind {
  kUsage,
  kInput,
  kSolver,
  kIo,
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input file: names the offending field and record index.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorKind::kInput, "parse error: " + what) {}
};

/// Referential or invariant breakage in an otherwise well-formed map.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what)
      : Error(ErrorKind::kInput, "integrity error: " + what) {}
};

/// Inconsistent or missing configuration (e.g. Ours-3D without a grid).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kUsage, "configuration error: " + what) {}
};

/// Caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what)
      : Error(ErrorKind::kUsage, "contract violation: " + what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what)
      : Error(ErrorKind::kSolver, "solver error: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what)
      : Error(ErrorKind::kIo, "i/o error: " + what) {}
};

}  // namespace mapsparse
