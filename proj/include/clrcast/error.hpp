#pragma once

#include <stdexcept>
#include <string>

namespace clrcast {

/// Base class of every error raised by the library. The CLI maps the three
/// subclasses onto process exit codes 1, 2 and 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed, non-finite or insufficient input data.
class DataError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed or an internal consistency check tripped.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters or configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace clrcast
