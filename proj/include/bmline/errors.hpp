#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bmline {

// Precondition/shape violations reuse std::invalid_argument; the types below
// carry extra payload the caller may want to inspect.

class SimulationAbort : public std::runtime_error {
 public:
  SimulationAbort(std::string what, std::size_t step)
      : std::runtime_error(std::move(what)), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class CflViolation : public std::runtime_error {
 public:
  CflViolation(std::string what, double suggested_dt)
      : std::runtime_error(std::move(what)), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

class PowerIterationError : public std::runtime_error {
 public:
  PowerIterationError(std::string what, double last_estimate)
      : std::runtime_error(std::move(what)), last_estimate_(last_estimate) {}
  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

}  // namespace bmline
