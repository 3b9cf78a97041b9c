#pragma once

#include <stdexcept>
#include <string>

namespace greenxva {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Correlation triple that is not a valid (positive definite) correlation.
class CorrelationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Series, iteration or quadrature that failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad geometry handed to the triangulator or mesher.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Singular or indefinite matrix in the dense linear algebra.
class LinearAlgebraError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid run configuration (CLI, Monte Carlo settings, cache keys).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace greenxva
