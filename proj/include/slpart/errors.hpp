#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slpart {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed coefficient / phi expression. `offset()` is the byte offset of
/// the offending token in the source string.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A coefficient evaluated to a non-finite value.
class EvalError : public Error {
 public:
  EvalError(const std::string& what, double x)
      : Error(what + " at x=" + std::to_string(x)), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// Invalid input data (configuration, measure, partition, parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace slpart
