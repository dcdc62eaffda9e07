#pragma once

#include <stdexcept>
#include <string>

namespace hmf {

// Violated input contract (bad parameters, empty windows, malformed grids).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN/Inf or loss of unitarity in a numerical kernel.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two independent evaluation paths disagree; points at a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Time integration drifted off the unit sphere.
class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, double time, double drift)
      : std::runtime_error(what), time_(time), drift_(drift) {}
  double time() const { return time_; }
  double drift() const { return drift_; }

 private:
  double time_;
  double drift_;
};

}  // namespace hmf
