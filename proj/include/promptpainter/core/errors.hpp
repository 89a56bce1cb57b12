#pragma once

#include <stdexcept>
#include <string>

namespace promptpainter {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition or invariant on a value (bad vector, bad shape, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent user configuration. CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A model backend failed to load or answer. CLI exit code 3.
class BackendError : public Error {
public:
    using Error::Error;
};

/// Non-finite values detected during optimization. CLI exit code 4.
class NumericError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace promptpainter
