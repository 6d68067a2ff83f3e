#pragma once

#include <stdexcept>
#include <string>

namespace locsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed geometry, out-of-range parameters, unknown config keys.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on a system it does not apply to.
class MisuseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Only N = 1 unit cells are supported by the Toeplitz formulation.
class UnsupportedConfiguration : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Fixed-step integration could not meet the determinant check.
class IntegrationAccuracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// 1/kappa (or the time-defected 1/kappa + c f) stopped being positive.
class SingularModulationError : public NumericalError {
 public:
  SingularModulationError(const std::string& what, double time)
      : NumericalError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Gamma(omega) is numerically singular at a quadrature node (omega sits on a band).
class NearSingularityError : public NumericalError {
 public:
  NearSingularityError(const std::string& what, double alpha)
      : NumericalError(what), alpha_(alpha) {}
  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

class RootFailure : public NumericalError {
 public:
  RootFailure(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace locsim
