#pragma once

#include <stdexcept>
#include <string>

namespace ptinv {

/// Base of every failure raised by the library. `exit_code()` is the status
/// the command-line front end reports for it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

class ParseError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// No eigenvalue strictly below the essential-spectrum floor (or below the
/// configured search floor for perturbed problems).
class NoEigenvalueBelowFloor : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

class BracketFailure : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

/// A sample table that cannot come from a first eigenvalue function.
class InconsistentTable : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 5; }
};

class WindowEmpty : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 6; }
};

/// lambda is (numerically) a pole of the quantity being evaluated.
class PoleAtLambda : public Error {
public:
    PoleAtLambda(const std::string& what, double lambda) : Error(what), lambda_(lambda) {}
    double lambda() const noexcept { return lambda_; }

private:
    double lambda_;
};

class NonConvergentTruncation : public Error {
public:
    using Error::Error;
};

class UnsupportedPotential : public Error {
public:
    using Error::Error;
};

/// Solution magnitude left the representable range during integration.
class NumericalOverflow : public Error {
public:
    NumericalOverflow(const std::string& what, double last_finite_x)
        : Error(what), last_finite_x_(last_finite_x) {}
    double last_finite_x() const noexcept { return last_finite_x_; }

private:
    double last_finite_x_;
};

}  // namespace ptinv
