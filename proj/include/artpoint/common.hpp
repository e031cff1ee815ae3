#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace artpoint {

// Base for all domain errors so callers can catch everything from one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad numeric field or impossible setting in a config struct.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; carries the 1-based line the parser choked on.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Container file with a bad magic, version, or truncated payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Geometric input that admits no sensible answer (zero-area mesh, all-identical points).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Rotation pool queried for a class with no stored entries.
class PoolMissError : public Error {
 public:
  using Error::Error;
};

// Metric whose denominator is empty (e.g. no correctly classified samples).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace artpoint
