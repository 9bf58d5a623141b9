#pragma once

#include <stdexcept>
#include <string>

namespace threefold {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A sampled expression carries a frequency the grid cannot resolve.
class AliasingError : public Error {
public:
    using Error::Error;
};

class PreconditionViolation : public Error {
public:
    using Error::Error;
};

/// Form degrees do not fit the requested operation.
class DegreeError : public Error {
public:
    using Error::Error;
};

/// Operands live on different grids or have different (p,q) types.
class ShapeError : public Error {
public:
    using Error::Error;
};

class NotRealError : public Error {
public:
    using Error::Error;
};

class NotPositiveError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class IndefinitenessError : public Error {
public:
    using Error::Error;
};

class PathNotAdmissible : public Error {
public:
    using Error::Error;
};

class BoundNotApplicable : public Error {
public:
    using Error::Error;
};

/// Imaginary drift above tolerance in a quantity that must be real.
class ImaginaryResidualError : public Error {
public:
    using Error::Error;
};

} // namespace threefold
