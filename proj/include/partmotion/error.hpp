#pragma once

#include <stdexcept>
#include <string>

namespace pm {

// Bad user input (files, schemas, preconditions). CLI exit code 1.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values, division by zero, diverged optimizations. CLI exit code 2.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pm
