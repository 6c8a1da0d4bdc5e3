#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reachmax {

/// A pivot fell below the singularity threshold: some transient state cannot
/// reach absorption, or an update produced a singular matrix.
class SingularMatrix : public std::runtime_error {
public:
    SingularMatrix(std::size_t column, double pivot);

    std::size_t column() const noexcept { return column_; }
    double pivot() const noexcept { return pivot_; }

private:
    std::size_t column_;
    double pivot_;
};

class InvalidGraph : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class CombinatorialLimit : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Raised by power iteration when it does not converge; carries the last L1 change.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(std::size_t iterations, double residual);

    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
    double residual_;
};

/// Malformed text input. `line()` is 1-based; 0 means "not tied to a line".
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DuplicateEdge : public ParseError {
public:
    using ParseError::ParseError;
};

/// A chain failed validation; `what()` lists every violation.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace reachmax
