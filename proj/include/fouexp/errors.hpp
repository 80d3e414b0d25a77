#pragma once

#include <stdexcept>
#include <string>

namespace fouexp {

/// Invalid input: a parameter outside its admissible range. Maps to CLI exit code 2.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation of a kernel exactly at its singular point.
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A numerical procedure failed on valid input. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double estimate, double error)
        : NumericalError(what), estimate_(estimate), error_(error) {}

    double estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

class FactorizationError : public NumericalError {
public:
    FactorizationError(const std::string& what, double min_eigenvalue)
        : NumericalError(what), min_eigenvalue_(min_eigenvalue) {}

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

/// The moment estimator is undefined (zero quadratic functional).
class EstimationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

namespace detail {
inline void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}
}  // namespace detail

}  // namespace fouexp
