#pragma once

#include <stdexcept>
#include <string>

namespace dbb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative radius,
/// non-finite input, even 2j, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The velocity field is undefined because the density vanishes exactly.
class SingularPointError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Density below the packet's floor; the guidance velocity is not trusted.
class LowDensityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The quantity is not defined for the given parameters (e.g. r_L for m > 0).
class UnsupportedError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A quantity that should be strictly positive is zero (e.g. Delta E).
class DegenerateError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The flux-based arrival density was asked for where j_r < 0.
class PositivityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The time-of-flight curve is not invertible on the r0 grid.
class MultiBranchError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Step-size underflow or failure to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace dbb
