#pragma once

#include <stdexcept>
#include <string>

namespace nkcert {

/// Argument outside the domain of a scalar function (negative t, t > chi, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Value outside the range of a modulus (inverse requested above its supremum).
class RangeError : public std::range_error {
public:
  using std::range_error::range_error;
};

/// A documented precondition does not hold (e.g. no sign change for bisection).
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Structural or parameter validation failure at construction time.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class SingularMatrixError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Problem setup failed (singular Jacobian at x0, zero residual, ...).
class SetupError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The high-precision reference solution could not be computed.
class OracleUnavailable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace nkcert
