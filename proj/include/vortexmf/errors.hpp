#ifndef VORTEXMF_ERRORS_HPP
#define VORTEXMF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vortexmf {

/// Non-finite or non-positive argument to a closed-form quantity.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Requested enthalpy is at or above the beta -> infinity supremum.
class UnreachableEnthalpyError : public std::domain_error {
public:
  UnreachableEnthalpyError(double requested, double supremum)
      : std::domain_error("enthalpy " + std::to_string(requested) +
                          " is unreachable: supremum is " +
                          std::to_string(supremum)),
        requested_(requested), supremum_(supremum) {}

  double requested() const noexcept { return requested_; }
  double supremum() const noexcept { return supremum_; }

private:
  double requested_;
  double supremum_;
};

class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two filaments coincide in a plane, or the angular momentum vanishes.
class SingularConfigurationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Oracle scan minimum landed on the scan boundary.
class RangeError : public std::range_error {
public:
  using std::range_error::range_error;
};

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class CheckpointError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Hamiltonian became non-finite during a run.
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace vortexmf

#endif // VORTEXMF_ERRORS_HPP
