#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spreg {

/// Input outside the mathematical domain of an operation (NaN, a <= 0, p outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid model description, configuration file or data file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Floating point breakdown during fitting. Carries the offending observation when known.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, std::ptrdiff_t row = -1)
      : std::runtime_error(row >= 0 ? what + " (row " + std::to_string(row) + ")" : what),
        row_(row) {}

  std::ptrdiff_t row() const noexcept { return row_; }

 private:
  std::ptrdiff_t row_;
};

/// Operation invoked on an object in an unusable state (e.g. summarizing an empty chain).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace spreg
