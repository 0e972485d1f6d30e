#pragma once

#include <stdexcept>
#include <string>

#include "buildtime/types.hpp"

namespace buildtime {

// Root of every error this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Missing, unexpected, or mismatched columns.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Unreadable or malformed files.
class IoError : public Error {
public:
    using Error::Error;
};

// Arguments outside an operation's precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A model could not be fitted to the given data.
class FitError : public Error {
public:
    using Error::Error;
};

// Iterative solver hit its iteration cap; carries the last iterate.
class ConvergenceError : public FitError {
public:
    ConvergenceError(const std::string& what, double intercept, Vector last_iterate)
        : FitError(what), intercept_(intercept), last_iterate_(std::move(last_iterate)) {}

    [[nodiscard]] double intercept() const noexcept { return intercept_; }
    [[nodiscard]] const Vector& last_iterate() const noexcept { return last_iterate_; }

private:
    double intercept_;
    Vector last_iterate_;
};

} // namespace buildtime
