#pragma once

#include <stdexcept>
#include <string>

namespace affrep {

/// Raised when arguments violate a documented precondition (dimension
/// mismatch, index out of range, unsupported dimension).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an input does not belong to the class an operation requires,
/// e.g. a non-equiaffine operator passed to the Weyl projector. The witness
/// names the offending component.
class ClassViolation : public std::domain_error {
public:
    ClassViolation(const std::string& what, std::string witness)
        : std::domain_error(what + ": " + witness), witness_(std::move(witness)) {}

    const std::string& witness() const noexcept { return witness_; }

private:
    std::string witness_;
};

/// Malformed serialized input.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace affrep
