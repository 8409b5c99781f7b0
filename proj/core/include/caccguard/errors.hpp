#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace caccguard {

// Base of every error raised by the library. Subclasses group failures by
// the CLI exit code they map onto.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A flow-map evaluation produced a NaN or infinity.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(std::size_t index, double value);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// More than one duplicated sensor carries a non-zero injection at once.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

// More than one guard matched the same sample.
class AmbiguousGuards : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (undefined reset edge, bad
// dimensions, non-positive step, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Two attack segments overlap on an open interval.
class ScheduleOverlap : public Error {
 public:
  ScheduleOverlap(std::size_t first, std::size_t second, const std::string& detail);
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed or invalid scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace caccguard
