#pragma once

#include <stdexcept>
#include <string>

namespace dprime {

// Domain errors map to CLI exit status 2, input errors to exit status 1.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RefinementUnavailable : public DomainError {
public:
    using DomainError::DomainError;
};

class PropagationOverflow : public DomainError {
public:
    using DomainError::DomainError;
};

class NearSingular : public DomainError {
public:
    using DomainError::DomainError;
};

class MeshRefinement : public DomainError {
public:
    using DomainError::DomainError;
};

class UnsupportedHypothesis : public DomainError {
public:
    using DomainError::DomainError;
};

class InsufficientData : public DomainError {
public:
    using DomainError::DomainError;
};

class DomainViolation : public DomainError {
public:
    using DomainError::DomainError;
};

class SchemaError : public InputError {
public:
    SchemaError(const std::string& pointer, const std::string& what)
        : InputError(pointer + ": " + what), pointer_(pointer) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

}  // namespace dprime
