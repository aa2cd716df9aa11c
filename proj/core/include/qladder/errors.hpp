#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qladder {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A formula was evaluated outside the range where it is defined.
class DomainError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// A fitting window is empty, too short or statistically unusable.
class WindowError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// The value-iteration grid does not reach far enough below the threshold.
class GridTooSmallError : public Error {
 public:
  using Error::Error;
};

/// The density-dependent model has no stationary distribution (zero leapfrog probability).
class NoStationarySolutionError : public Error {
 public:
  using Error::Error;
};

/// The imitation intensity diverges because all mass sits on the lowest level.
class IllDefinedModelError : public Error {
 public:
  using Error::Error;
};

/// A modelling assumption (monotone value function, single threshold crossing) failed.
class ModelViolationError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// An iteration did not settle. Carries the last iterate when one is meaningful.
class ConvergenceError : public NumericError {
 public:
  explicit ConvergenceError(const std::string& what, std::vector<double> last_iterate = {})
      : NumericError(what), last_iterate_(std::move(last_iterate)) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

/// The self-consistent support-size loop entered a cycle.
class OuterLoopCycleError : public ConvergenceError {
 public:
  OuterLoopCycleError(const std::string& what, std::vector<int> cycle)
      : ConvergenceError(what), cycle_(std::move(cycle)) {}

  const std::vector<int>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<int> cycle_;
};

/// The speed function v(gamma) has no interior minimum.
class NoMinimumError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The particle population died out.
class ExtinctionError : public Error {
 public:
  ExtinctionError(const std::string& what, std::int64_t step) : Error(what), step_(step) {}

  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

using WarningHandler = std::function<void(std::string_view)>;

/// Installs the sink for non-fatal warnings (renormalized inputs etc.) and
/// returns the previous one. The default writes to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace qladder
