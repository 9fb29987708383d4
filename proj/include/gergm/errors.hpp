// Exception hierarchy shared across the library. The CLI maps these onto
// process exit codes (config -> 2, numerical -> 3).
#pragma once

#include <stdexcept>
#include <string>

namespace gergm {

// Bad user input: malformed config, invalid argument combinations.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical procedure failed (divergent integral, no bracket, ...).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Legendre transform has no finite optimum for the requested point.
struct UnboundedRateError : NumericError {
    explicit UnboundedRateError(const std::string& msg) : NumericError(msg) {}
};

// Exact combinatorial routine refused because the instance is too large.
struct TooLargeError : std::runtime_error {
    explicit TooLargeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Weighted homomorphism with an ill-defined power (negative base,
// non-integer exponent).
struct WeightDomainError : std::runtime_error {
    explicit WeightDomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Variational objective is not coercive on the probed bracket.
struct NonCoerciveError : NumericError {
    explicit NonCoerciveError(const std::string& msg) : NumericError(msg) {}
};

// Model spec fails the hypotheses of every supported solver path.
struct AdmissibilityError : std::runtime_error {
    explicit AdmissibilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested partition function does not exist (parameter past the
// divergence boundary).
struct DivergenceError : NumericError {
    explicit DivergenceError(const std::string& msg) : NumericError(msg) {}
};

// MCMC state escaped the stability region.
struct InstabilityError : NumericError {
    explicit InstabilityError(const std::string& msg) : NumericError(msg) {}
};

// Monte Carlo estimate with effective sample size below the floor.
// Carries the partial estimate so callers can still inspect it.
struct UnreliableEstimateError : NumericError {
    double psi_hat;
    double stderr_;
    double ess;
    UnreliableEstimateError(const std::string& msg, double psi, double se, double ess_)
        : NumericError(msg), psi_hat(psi), stderr_(se), ess(ess_) {}
};

// MC-MLE trust region collapsed: every candidate step had degenerate
// importance weights.
struct StepSizeError : NumericError {
    explicit StepSizeError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace gergm
