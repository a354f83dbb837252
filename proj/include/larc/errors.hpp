#pragma once

#include <stdexcept>
#include <string>

namespace larc {

/// Malformed or out-of-contract input (shapes, indices, non-skew generators).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lie closure hit its admission/sweep cap before saturating.
class SaturationError : public std::runtime_error {
 public:
  SaturationError(const std::string& what, int partial_dim)
      : std::runtime_error(what), partial_dim_(partial_dim) {}

  int partial_dim() const { return partial_dim_; }

 private:
  int partial_dim_;
};

/// Declared group assertions contradict each other or the generator kind.
class AssertionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Not enough orbit points near the requested center.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace larc
