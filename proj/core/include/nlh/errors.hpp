#pragma once

#include <stdexcept>
#include <string>

namespace nlh {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition on an input value was violated.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Adaptive ODE integration could not reach the requested endpoint.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double last_good_rho)
        : Error(what), last_good_rho_(last_good_rho) {}

    double last_good_rho() const noexcept { return last_good_rho_; }

private:
    double last_good_rho_;
};

/// The two tail windows of a profile disagree; the grid should extend further.
class TailNotResolvedError : public Error {
public:
    using Error::Error;
};

/// A root-finding or bisection bracket does not satisfy its sign/count precondition.
class BracketError : public Error {
public:
    using Error::Error;
};

/// Grid spacing too coarse for the requested discretization.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A norm integral diverges because of the tail exponent.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Quadrature did not converge to the requested accuracy.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Raised when p >= p_JL: no radial expander is linearly unstable.
class NoUnstableExpanderError : public Error {
public:
    using Error::Error;
};

/// The (lambda_bar, q, r) triple violates the eigenvalue-smallness condition.
class FeasibilityError : public Error {
public:
    using Error::Error;
};

/// A time step exceeded the explicit stability cap of the nonlinear term.
class StabilityError : public Error {
public:
    StabilityError(const std::string& what, double suggested_dtau)
        : Error(what), suggested_dtau_(suggested_dtau) {}

    double suggested_dtau() const noexcept { return suggested_dtau_; }

private:
    double suggested_dtau_;
};

/// The ancient-branch seed was too large to stay in the linear regime.
class AmplitudeError : public Error {
public:
    using Error::Error;
};

}  // namespace nlh
