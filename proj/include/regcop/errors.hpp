#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regcop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class EstimationError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public EstimationError {
public:
    using EstimationError::EstimationError;
};

/// Inputs whose expected-loss-preserving calibration has no valid solution.
class CalibrationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A pipeline step was run before the artifact it consumes exists.
class DependencyError : public Error {
public:
    using Error::Error;
};

} // namespace regcop
