#pragma once

#include <stdexcept>
#include <string>

namespace gridfuse {

/// Bad caller input: out-of-range fractions, mismatched lengths, unknown ids.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation that needs at least one observation received none.
class NoDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Factorization or decomposition failed even after regularization.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The training objective became non-finite.
class TrainingDiverged : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// Power flow produced a non-positive squared voltage.
class InfeasibleOperatingPoint : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// Malformed input file. `line` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(format(source, line, what)), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& source, std::size_t line, const std::string& what) {
        if (line == 0) return source + ": " + what;
        return source + ":" + std::to_string(line) + ": " + what;
    }
    std::size_t line_;
};

}  // namespace gridfuse
