#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments: empty domain, unsupported degree, sizes too small.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A point lies outside [x_min, x_max].
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Base for failures of the numerics rather than of the inputs.
class NumericError : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public NumericError {
public:
    explicit NotPositiveDefinite(std::size_t pivot)
        : NumericError("matrix is not positive definite (pivot " +
                       std::to_string(pivot) + ")"),
          pivot_(pivot) {}

    [[nodiscard]] std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// sigma^2 came out negative beyond rounding slack.
class DegenerateFit : public NumericError {
public:
    using NumericError::NumericError;
};

class NonFiniteLikelihood : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace mmb
