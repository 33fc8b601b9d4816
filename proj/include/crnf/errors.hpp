#pragma once

#include <stdexcept>
#include <string>

namespace crnf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mismatched variables or orders, unknown variable names, malformed shapes.
class StructuralError : public Error {
public:
    using Error::Error;
};

// A composition would read coefficients beyond the known truncation order.
class TruncationError : public Error {
public:
    using Error::Error;
};

// invert_unit on a series with zero constant term.
class NonUnitError : public Error {
public:
    using Error::Error;
};

// Singular constant Jacobian in an implicit-function or Cramer step.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

// Invalid user-supplied parameters (dilation constraint, tau not real, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Input that fails a domain validity check (reality, admissibility, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Normalization refused because the recursion matrix degenerates at level k.
class ResonanceError : public Error {
public:
    ResonanceError(int k, const std::string& what) : Error(what), k_(k) {}
    int k() const { return k_; }

private:
    int k_;
};

// A postcondition the theory guarantees was found violated.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace crnf
