#pragma once

#include <stdexcept>
#include <string>

namespace mdh {

// Bad user input: unreadable file, malformed CSV, invalid option values.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data on which the method is undefined (zero variance, too few rows).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Labels that cannot drive a semi-supervised run.
class LabelConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative eigen-solver ran out of iterations.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace mdh
