#pragma once

#include <stdexcept>
#include <string>

namespace somor {

/// Root of all library errors. `numerical()` separates bad input from
/// numerical failure; the CLI maps the two onto different exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, bool numerical = false)
      : std::runtime_error(what), numerical_(numerical) {}
  bool numerical() const noexcept { return numerical_; }

 private:
  bool numerical_;
};

/// Dimension mismatch or an invalid argument value.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(what, false) {}
};

/// Malformed input file or manifest.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what, false) {}
};

/// Non-finite callback output.
class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& what) : Error(what, true) {}
};

/// Singular (shifted) operator, e.g. a shift at a quadratic eigenvalue.
class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what) : Error(what, true) {}
};

/// Overflow of an analytic sample, or a window that is too long.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(what, true) {}
};

/// Newton or time-integration failure.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(what, true) {}
};

/// Requested operation is not available for this input.
class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what) : Error(what, false) {}
};

}  // namespace somor
