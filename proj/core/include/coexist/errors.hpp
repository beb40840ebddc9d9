#pragma once

#include <stdexcept>
#include <string>

namespace coexist {

/// Malformed input, violated precondition, or invalid scenario.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature non-convergence, grid truncation, or other numerical failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coexist
