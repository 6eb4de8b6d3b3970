#ifndef CSUM_ERRORS_HPP
#define CSUM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace csum {

// Invalid argument (non-finite input, empty sample, bad parameter).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation called outside its regime (e.g. Lundberg root requested in the
// proper regime, normal approximation in the defective one).
class RegimeError : public std::runtime_error {
public:
    explicit RegimeError(const std::string& msg) : std::runtime_error(msg) {}
};

// A quadrature or root finder could not reach the requested tolerance.
// Carries the best estimate obtained so far.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& msg, double best)
        : std::runtime_error(msg), best_estimate(best) {}
    double best_estimate;
};

// Variance parameter degenerates to zero (X proportional to T, or a
// singular block correlation matrix).
class DegeneracyError : public std::runtime_error {
public:
    explicit DegeneracyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structural problem with a model (unreachable reference state,
// non-stochastic transition row, unsupported operation for the form).
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

// Config file syntax or consistency problem.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace csum

#endif
