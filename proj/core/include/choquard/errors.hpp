#pragma once

#include <stdexcept>
#include <string>

namespace choquard {

/// Malformed arguments: dimension mismatches, negative radii, support violations.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Model parameters outside their admissible range (alpha, p, lambda, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation requested at a point where the quantity is undefined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The nonlocal term vanishes, so no positive Nehari scaling exists.
class NoProjection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method ran out of iterations; carries the last residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// No admissible starting field could be produced.
class InitializerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampling probe found no admissible sample.
class InconclusiveProbe : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal contract, e.g. a kernel table too small for a convolution.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace choquard
