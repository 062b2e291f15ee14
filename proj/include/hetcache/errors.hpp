#pragma once

#include <stdexcept>
#include <string>

namespace hetcache {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario document does not follow the schema. `field()` names the offending key path.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error("parse error at '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A scenario invariant does not hold.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a model function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The model assumption R_0(xi) < B_l is violated for some pico.
class AssumptionError : public Error {
 public:
  AssumptionError(int pico, const std::string& what)
      : Error(what), pico_(pico) {}
  int pico() const noexcept { return pico_; }

 private:
  int pico_;
};

/// Rejection sampling could not place a point in a region.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed (a bug, not bad input).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetcache
