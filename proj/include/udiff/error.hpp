#pragma once

#include <stdexcept>
#include <string>

namespace udiff {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of a function (e.g. r < 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid operator parameters or operation arguments.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A quadrature or truncation did not reach its accuracy target.
class AccuracyError : public Error {
public:
    using Error::Error;
};

/// A bracketing search found no crossing in its admissible window.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Linear algebra failure: non-convergence, breakdown, lost positivity.
class NumericError : public Error {
public:
    using Error::Error;
};

/// The ground level is numerically degenerate.
class DegeneracyError : public NumericError {
public:
    using NumericError::NumericError;
};

/// A resolvent was requested at (or too close to) an eigenvalue.
class SpectralProximityError : public NumericError {
public:
    SpectralProximityError(const std::string& what, double nearest)
        : NumericError(what), nearest_eigenvalue(nearest) {}
    double nearest_eigenvalue;
};

/// Vector sizes do not match the operator.
class DimensionError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Malformed configuration file or result bundle.
class InputError : public Error {
public:
    using Error::Error;
};

} // namespace udiff
