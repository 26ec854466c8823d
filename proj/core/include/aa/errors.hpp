#ifndef AA_ERRORS_HPP
#define AA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aa {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An operator was evaluated outside its domain (e.g. a pole).
struct DomainError : Error {
    using Error::Error;
};

/// A fixed-point evaluation produced NaN or Inf.
struct NonFiniteError : Error {
    using Error::Error;
};

/// The residual is exactly zero where a nonzero residual is required.
struct ZeroResidualError : Error {
    using Error::Error;
};

/// A triangular or tridiagonal solve hit a zero (or negligible) pivot.
struct SingularError : Error {
    using Error::Error;
};

/// A trace does not carry enough history for the requested computation.
struct InsufficientHistoryError : Error {
    using Error::Error;
};

/// An audit requiring a contraction constant was given kappa >= 1.
struct NotContractiveError : Error {
    using Error::Error;
};

/// Rate estimation encountered a non-positive residual norm.
struct NonPositiveResidualError : Error {
    using Error::Error;
};

/// Two consecutive iterates coincide, so a Lipschitz quotient is undefined.
struct DegenerateStepError : Error {
    using Error::Error;
};

} // namespace aa

#endif // AA_ERRORS_HPP
