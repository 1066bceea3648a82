#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pvbess {

/// Bad caller input: non-positive factor, mismatched lengths, out-of-range fractions.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input text could not be parsed. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Parsed input is well-formed but semantically inconsistent (duplicates, broken series).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a precondition of a state transition (e.g. charging past headroom).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A produced artifact failed an internal consistency check.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// No candidate satisfies the constraints (e.g. nothing fits the budget).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pvbess
