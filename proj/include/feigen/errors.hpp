#pragma once

#include <stdexcept>
#include <string>

namespace feigen {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The tail of a coefficient list does not decay geometrically; the solve is
/// under-resolved and needs more coefficients.
class NonDecayingTail : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, int iterations, double last_residual)
        : Error(what), iterations_(iterations), last_residual_(last_residual) {}
    int iterations() const noexcept { return iterations_; }
    double last_residual() const noexcept { return last_residual_; }

private:
    int iterations_;
    double last_residual_;
};

/// An evaluation was requested outside the disk where the truncated series is trusted.
class OutsideTrusted : public Error {
public:
    using Error::Error;
};

class RootNotBracketed : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class VerificationFailed : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class BracketFailure : public Error {
public:
    BracketFailure(const std::string& what, int level) : Error(what), level_(level) {}
    int level() const noexcept { return level_; }

private:
    int level_;
};

class InsufficientDepth : public Error {
public:
    using Error::Error;
};

class NewtonFailed : public Error {
public:
    using Error::Error;
};

class NotRepelling : public Error {
public:
    using Error::Error;
};

}  // namespace feigen
