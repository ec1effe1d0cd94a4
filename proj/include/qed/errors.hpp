#pragma once

#include <stdexcept>
#include <string>

namespace qed {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The model has no stationary regime (e.g. lambda >= s * mu without abandonment).
class InstabilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A series, quadrature or root search failed to converge.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent simulator or CLI configuration.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qed
