#pragma once

#include <stdexcept>
#include <string>

namespace nlsrm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid distribution, matrix dimension, or model parameter.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Requested operation is not supported for this function/distribution pair.
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// Input violates an operation's precondition (e.g. non-symmetric matrix).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Argument outside the analytic domain (e.g. real z inside the semicircle support).
class DomainError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace nlsrm
