#pragma once

#include <stdexcept>
#include <string>

namespace ppcons {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, unknown nodes, schema problems.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Input on which a certificate construction is undefined (e.g. a zero
/// passivity index at a boundary node, or a boundary node without
/// intra-network neighbours).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// A network plug plan whose boundary edges violate the non-adjacency rule.
class AssumptionViolation : public Error {
public:
    using Error::Error;
};

/// Dynamics that are outside the supported class (RHP poles, purely
/// imaginary non-zero poles, improper transfer functions).
class UnsupportedSystem : public Error {
public:
    using Error::Error;
};

/// Non-finite state encountered during integration.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time)
        : Error(what), time_(time) {}

    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace ppcons
