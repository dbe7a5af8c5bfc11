#pragma once

#include <stdexcept>
#include <string>

namespace wradon {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or plane outside the domain on which an object is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Quadrature could not reach the requested tolerance within max_evals.
/// Carries the best estimate that was available when the budget ran out.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, double best_estimate, double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

/// No certified threshold offset below 1 (usually: k_max too small).
class NotFound : public Error {
 public:
  using Error::Error;
};

/// A local weight could not be made valid on any window wider than the floor.
class ConstructionFailed : public Error {
 public:
  using Error::Error;
};

/// No lobe of the required sign was found on the plane.
class SignSearchFailed : public Error {
 public:
  using Error::Error;
};

/// The greedy cover needed more local weights than allowed.
class CoverTooLarge : public Error {
 public:
  using Error::Error;
};

/// A 2-plane frame in R^d is not orthonormal or the foot point is not orthogonal to it.
class FrameError : public Error {
 public:
  using Error::Error;
};

/// The requested line misses the shell it was asked about.
class NoIntersection : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or profile file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace wradon
