#pragma once

#include <stdexcept>
#include <string>

namespace wgqed {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (non-finite, negative, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Valid physics, but not covered by the requested engine (e.g. Laguerre closed
// forms with heterogeneous couplings).
class UnsupportedConfiguration : public Error {
public:
    using Error::Error;
};

// Numerical precondition violated at run time: grid too coarse, population
// underflow, pulse outside the time window.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Malformed user configuration (unknown keys, bad values).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace wgqed
