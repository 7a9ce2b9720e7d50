#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace geovo {

/// Raised when an argument violates a documented precondition.
class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The robot centre lies inside the inflated obstacle disk, so no tangent
/// cone exists. Callers substitute a fallback constraint.
class DegenerateCone : public std::runtime_error {
public:
  DegenerateCone() : std::runtime_error("velocity obstacle cone is degenerate") {}
};

/// Non-finite objective or gradient at a feasible point.
class NumericalFailure : public std::runtime_error {
public:
  NumericalFailure(const std::string& what, std::vector<double> iterate)
      : std::runtime_error(what), iterate_(std::move(iterate)) {}

  const std::vector<double>& iterate() const noexcept { return iterate_; }

private:
  std::vector<double> iterate_;
};

/// Scenario file could not be parsed.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Scenario parsed but a field violates its invariant.
class ValidationError : public std::runtime_error {
public:
  ValidationError(const std::string& field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field_(field) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

} // namespace geovo
