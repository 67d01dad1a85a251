#pragma once

#include <stdexcept>
#include <string>

namespace pat {

/// Invalid or inconsistent input configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver blow-up, failed iteration, or other numerical breakdown (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Neumann series increments grew, or rays failed to certify visibility (exit code 4).
class NonContractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symbol evaluation outside the hyperbolic region.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace pat
