#pragma once

#include <stdexcept>

namespace sthygarch {

// Parameter vector violates a model constraint.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of an operation (empty series, d at a boundary, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Linear algebra or optimizer breakdown.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inconsistent options or inputs (bad CSV, unusable starting points, ...).
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sthygarch
