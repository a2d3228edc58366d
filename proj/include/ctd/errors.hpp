#pragma once

#include <stdexcept>
#include <string>

namespace ctd {

/// Invalid user-facing configuration (bad grid, bad parameters, schema violations).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The moment matrix of a nodal patch interpolation could not be inverted.
class BasisError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Base class for failures that happen while time stepping.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : SolverError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A fixed factor of a rank-one mode vanished, so the axis system is singular.
class DegenerateModeError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace ctd
