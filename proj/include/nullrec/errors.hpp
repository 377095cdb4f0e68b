#pragma once

#include <stdexcept>
#include <string>

namespace nullrec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter or precondition violation.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The model lacks an estimator the operation needs.
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

/// Requested numerical precision was not reached; carries the achieved error.
class PrecisionError : public Error {
 public:
  PrecisionError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  [[nodiscard]] double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Rejection sampler fell below its acceptance floor.
class EfficiencyError : public Error {
 public:
  EfficiencyError(const std::string& what, double acceptance_rate)
      : Error(what), acceptance_rate_(acceptance_rate) {}
  [[nodiscard]] double acceptance_rate() const noexcept { return acceptance_rate_; }

 private:
  double acceptance_rate_;
};

/// Lag-covariance series of f did not stabilize.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double oscillation)
      : Error(what), oscillation_(oscillation) {}
  [[nodiscard]] double oscillation() const noexcept { return oscillation_; }

 private:
  double oscillation_;
};

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

}  // namespace nullrec
