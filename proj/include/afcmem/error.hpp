#pragma once

#include <stdexcept>
#include <string>

namespace afcmem {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration or input file is malformed. The message names the field or line.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A physical precondition of an operation was violated.
/// Messages are prefixed with the operation name, e.g. "carve_pit: ...".
class PhysicsError : public Error {
public:
    PhysicsError(const std::string& operation, const std::string& what)
        : Error(operation + ": " + what), operation_(operation) {}

    const std::string& operation() const noexcept { return operation_; }

private:
    std::string operation_;
};

/// Reading or writing an artifact failed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace afcmem
