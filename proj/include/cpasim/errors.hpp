#ifndef CPASIM_ERRORS_HPP
#define CPASIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cpasim {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or schema-violating configuration input. CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An element or state violates a physical constraint. CLI exit code 3.
class PhysicalityError : public Error {
public:
    using Error::Error;
};

/// Amplitudes do not satisfy the required normalization.
class NormalizationError : public PhysicalityError {
public:
    using PhysicalityError::PhysicalityError;
};

/// The absorber Gram matrix would not be positive semidefinite (|2tr| > l^2).
class UnphysicalAbsorberError : public PhysicalityError {
public:
    using PhysicalityError::PhysicalityError;
};

/// Requested an absorber quantity on an element with l = 0.
class NoAbsorberError : public PhysicalityError {
public:
    using PhysicalityError::PhysicalityError;
};

/// A numerical invariant (norm conservation, probability completeness)
/// failed beyond tolerance. CLI exit code 4.
class InvariantError : public Error {
public:
    using Error::Error;
};

} // namespace cpasim

#endif
