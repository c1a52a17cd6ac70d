#pragma once

#include <stdexcept>
#include <string>

namespace permlaw {

// Raised when an iterative numeric routine cannot deliver its advertised
// accuracy (singular input, non-convergence).  Domain and configuration
// errors use std::invalid_argument instead.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace permlaw
