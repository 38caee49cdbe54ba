#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qnnbench {

// Bad argument: wrong shape, non-finite value, unnormalized state, ...
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unit-circle activation hit an exactly-zero weighted sum.
class DegenerateActivation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed row in an input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A dataset parsed cleanly but does not have the expected composition.
class DatasetIntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qnnbench
