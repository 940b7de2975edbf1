#pragma once

#include <stdexcept>
#include <string>

namespace harnack {

/// A computation produced a non-finite or otherwise unusable value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a support curve stops being strictly convex during a flow.
class ConvexityLossError : public NumericalError {
 public:
  ConvexityLossError(const std::string& what, double last_good_time)
      : NumericalError(what), last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

/// Raised by grid PDE solvers when the iteration blows up.
class InstabilityError : public NumericalError {
 public:
  InstabilityError(const std::string& what, long step)
      : NumericalError(what), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// First fundamental form too close to singular for a curvature estimate.
class DegenerateMetricError : public NumericalError {
 public:
  DegenerateMetricError(const std::string& what, double determinant)
      : NumericalError(what), determinant_(determinant) {}

  double determinant() const noexcept { return determinant_; }

 private:
  double determinant_;
};

}  // namespace harnack
