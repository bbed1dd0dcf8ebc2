#pragma once

#include <stdexcept>
#include <string>

namespace graphonlab {

// Argument outside the mathematical domain of an operation (x ∉ [0,1], n = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent input data: asymmetric grids, out-of-range
// entries, unparseable files.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Request exceeds a documented size limit.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace graphonlab
