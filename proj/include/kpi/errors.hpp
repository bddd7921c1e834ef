#pragma once

#include <stdexcept>
#include <string>

namespace kpi {

// Base for all domain errors raised by the lab.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// kp_symbol / kp_group_velocity evaluated at xi = 0.
struct ZeroXFrequencyError : Error {
  using Error::Error;
};

// dx_inv / linear_propagator fed a field whose x-mean is not numerically zero.
struct ZeroMeanError : Error {
  using Error::Error;
};

// Antiderivative requested for a profile whose required moments do not vanish.
struct MomentError : Error {
  using Error::Error;
};

// render() asked to place a sum whose support exceeds the grid box.
struct SupportOverflowError : Error {
  using Error::Error;
};

// estimate_IV fed parameter sets differing in more than omega.
struct ParamMismatchError : Error {
  using Error::Error;
};

// ApproxParams / RunConfig violating the (alpha, beta) constraints.
struct ConstraintError : Error {
  using Error::Error;
};

// sobolev_ratio fed a field with a vanishing right-hand factor.
struct DegenerateRatioError : Error {
  using Error::Error;
};

// Solver blow-up detector tripped.
struct InstabilityError : Error {
  using Error::Error;
};

}  // namespace kpi
