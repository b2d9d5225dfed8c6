#pragma once

#include <stdexcept>
#include <string>

namespace sheafstab {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input: bad rationals, dimension mismatches,
/// classes outside the required cones, schema violations, and so on.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Raised when a lattice admits several maximal destabilizing subobjects
/// that the deterministic tie-break cannot separate.
class AmbiguousMdsError : public Error {
public:
    explicit AmbiguousMdsError(const std::string& what) : Error(what) {}
};

} // namespace sheafstab
