#pragma once

#include <stdexcept>
#include <string>

namespace grfmcmc {

// Base for all toolkit errors so callers can catch one type at the boundary.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller.
struct ContractError : Error {
  using Error::Error;
};

// Malformed user-facing input (files, JSON configs, CLI values).
struct ParseError : ContractError {
  using ContractError::ContractError;
};

// An exact computation was requested beyond the size it is guaranteed for.
struct OracleRefusalError : Error {
  using Error::Error;
};

// A matrix that must be invertible / positive definite is not.
struct SingularMatrixError : Error {
  using Error::Error;
};

// An iterative procedure left its trust region.
struct DivergenceError : Error {
  using Error::Error;
};

// Requested analytical bound does not apply to the supplied constants.
struct OutOfRegimeError : Error {
  using Error::Error;
};

// No usable ergodicity certificate could be established for a kernel.
struct CertificateError : Error {
  using Error::Error;
};

}  // namespace grfmcmc
