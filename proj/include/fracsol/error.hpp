#pragma once

#include <stdexcept>
#include <string>

namespace fracsol {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  /// Short machine-readable tag, e.g. "not_converged".
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

/// A solver or integrator failed to produce a usable result.
class NumericalError : public Error {
 public:
  NumericalError(std::string kind, const std::string& what) : Error(std::move(kind), what) {}
};

/// Malformed or inconsistent file contents.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format_error", what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace fracsol
