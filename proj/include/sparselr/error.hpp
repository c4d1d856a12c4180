#pragma once

#include <stdexcept>
#include <string>

namespace sparselr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operator supports that are not adjacent, overlapping, or not nested as required.
class SupportMismatch : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Site or bond index outside the chain, or impurity too close to the boundary.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Numeric parameter outside its mathematical domain (mu <= 0, a >= 1/2, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Relative placement of supports / impurities violates an ordering hypothesis.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A truncated series or supremum scan did not settle inside its window.
class NonConvergence : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace sparselr
