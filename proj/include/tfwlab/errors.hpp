#pragma once

#include <stdexcept>
#include <string>

namespace tfwlab {

// Input outside an operation's validity window.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericalError {
public:
  NonConvergence(const std::string& what, double last_update, double last_residual,
                 int iterations)
      : NumericalError(what), last_update(last_update), last_residual(last_residual),
        iterations(iterations) {}
  double last_update;
  double last_residual;
  int iterations;
};

class GridTooSmall : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class OptimizerFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class BoundaryMatchFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class GridMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace tfwlab
