#ifndef AGHQ_ERRORS_HPP
#define AGHQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aghq {

/// Base class for all failures raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad arguments to a library call (quadrature order out of range, bad level, ...).
class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

/// k^p exceeds the configured point cap.
class DimensionalBlowupError : public InvalidArgumentError {
public:
  using InvalidArgumentError::InvalidArgumentError;
};

/// Log-density (or a user-supplied derivative) returned a non-finite value.
class EvaluationError : public Error {
public:
  using Error::Error;
};

/// Optimizer failed to reach the gradient tolerance within the iteration budget.
class OptimizationError : public Error {
public:
  using Error::Error;
};

/// Negative Hessian at the mode is not positive definite at working precision.
class CurvatureError : public Error {
public:
  using Error::Error;
};

/// Requested interpolant does not exist (single-node rule).
class InterpolationUnavailableError : public Error {
public:
  using Error::Error;
};

/// Not enough data to carry out an estimation (rate fits).
class EstimationError : public Error {
public:
  using Error::Error;
};

}  // namespace aghq

#endif
