#pragma once

#include <stdexcept>
#include <string>

namespace cocylab {

// Precondition violated by the caller (bad index, k out of range, p < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A computation left the representable range or broke down numerically.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProductOverflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace cocylab
