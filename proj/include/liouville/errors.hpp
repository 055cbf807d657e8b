#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace liouville {

// Base of every error the library throws. The CLI maps the subclasses onto
// exit codes; library callers can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: non-square matrices, NaNs, parameters outside their range.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Argument is well formed but outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class LinearSolveError : public Error {
public:
    using Error::Error;
};

class NoRealRoot : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double last_good_radius)
        : Error(what), last_good_radius_(last_good_radius) {}
    double last_good_radius() const { return last_good_radius_; }

private:
    double last_good_radius_;
};

// exp(U) would overflow: the initial data is far outside the useful range.
class BlowupError : public Error {
public:
    using Error::Error;
};

class ExtractionError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::vector<double> best_iterate, double best_residual)
        : Error(what), best_(std::move(best_iterate)), best_residual_(best_residual) {}
    const std::vector<double>& best_iterate() const { return best_; }
    double best_residual() const { return best_residual_; }

private:
    std::vector<double> best_;
    double best_residual_;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

// A leading-term formula was asked for outside the regime it describes.
class WrongRegime : public Error {
public:
    using Error::Error;
};

}  // namespace liouville
