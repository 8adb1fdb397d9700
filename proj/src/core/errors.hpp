#pragma once

#include <stdexcept>
#include <string>

namespace soiltag {

// Base for all library errors. Subclasses map onto C API status codes
// and CLI exit codes (domain/infeasible -> 2, config/io -> 1).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input outside the mathematical or physical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Shape / dimension mismatch between related containers.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// A search or estimation problem with no admissible solution.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& msg) : Error(msg) {}
};

// Malformed configuration or file content.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Filesystem failure.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

inline void check_domain(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

inline void check_shape(bool ok, const std::string& msg) {
  if (!ok) throw ShapeError(msg);
}

}  // namespace soiltag
