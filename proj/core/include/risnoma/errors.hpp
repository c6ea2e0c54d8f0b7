#pragma once

#include <stdexcept>
#include <string>

namespace risnoma {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration field violates its domain. `field()` names the offender.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Rate thresholds of a cluster cannot be met with the given effective gains.
class InfeasibleThresholds : public Error {
 public:
  using Error::Error;
};

class SubproblemInfeasible : public Error {
 public:
  using Error::Error;
};

class IterationLimit : public Error {
 public:
  using Error::Error;
};

class ScenarioInfeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace risnoma
