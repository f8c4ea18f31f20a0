#pragma once

#include <stdexcept>
#include <string>

namespace hlc {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on parameters or dimensions was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical input failed a structural check (hermiticity, PSD, finiteness).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A solver could not produce an answer (distinct from a proven infeasibility).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A certificate failed re-verification.
class CertificateError : public Error {
 public:
  using Error::Error;
};

}  // namespace hlc
