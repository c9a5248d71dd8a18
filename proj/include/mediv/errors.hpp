#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace mediv {

// Base for recoverable domain errors. Contract misuse (bad sizes, invalid
// configuration values) throws std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The observed outcome has probability zero under every parameter value.
class ZeroEvidence : public Error {
 public:
  using Error::Error;
};

class InvalidOutcome : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Count sample violates a domain invariant (fewer than two species, ...).
class InvalidSample : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

// Constraint function is constant, so no multiplier can move its mean.
class DegenerateConstraint : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class NumericalOverflow : public Error {
 public:
  using Error::Error;
};

// Root-finder observed zero variance everywhere yet a nonzero residual.
class StalledAtDegenerate : public Error {
 public:
  using Error::Error;
};

// Moment target lies outside the attainable open interval.
class UnattainableTarget : public Error {
 public:
  UnattainableTarget(double target, double lo, double hi)
      : Error(format(target, lo, hi)), target_(target), lo_(lo), hi_(hi) {}

  double target() const noexcept { return target_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  static std::string format(double target, double lo, double hi) {
    std::ostringstream os;
    os << "moment target " << target << " is outside the attainable interval (" << lo << ", " << hi
       << ")";
    return os.str();
  }

  double target_;
  double lo_;
  double hi_;
};

// Input file failed to parse; line is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message, std::size_t line = 0)
      : Error(message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mediv
