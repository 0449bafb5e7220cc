#ifndef ELLIPTIC_ERRORS_HPP
#define ELLIPTIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace elliptic {

/// Base of every error thrown by the library. `exit_code()` is what the CLI
/// returns when the error escapes a command.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 4; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

class DomainError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// K_g evaluated at (or numerically on top of) a zero of g.
class PoleError : public DomainError {
public:
    PoleError(const std::string& what, double abscissa)
        : DomainError(what), abscissa_(abscissa) {}
    double abscissa() const noexcept { return abscissa_; }

private:
    double abscissa_;
};

/// Sign structure of g (b, b~, zeta) could not be located.
class StructureError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class StiffFailure : public Error {
public:
    StiffFailure(const std::string& what, double radius) : Error(what), radius_(radius) {}
    double radius() const noexcept { return radius_; }

private:
    double radius_;
};

class NoCrossingError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class TailTooShort : public Error {
public:
    using Error::Error;
};

/// A dual nonlinearity was evaluated beyond its tabulated range. Carries the
/// abscissa needed so the caller can extend the table.
class RangeExceeded : public Error {
public:
    RangeExceeded(const std::string& what, double needed) : Error(what), needed_(needed) {}
    double needed() const noexcept { return needed_; }

private:
    double needed_;
};

class ResolutionError : public Error {
public:
    using Error::Error;
};

}  // namespace elliptic

#endif
