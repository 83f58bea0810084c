#pragma once

#include <stdexcept>
#include <string>

namespace ldhom {

/// Invalid user input or configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature or optimizer failure (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ldhom
