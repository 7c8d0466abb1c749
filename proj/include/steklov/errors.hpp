#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace steklov {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidLevel : public Error {
public:
  using Error::Error;
};

class InvalidCoefficient : public Error {
public:
  using Error::Error;
};

class UnsupportedDomain : public Error {
public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

class DimensionTooLarge : public Error {
public:
  using Error::Error;
};

class NestingError : public Error {
public:
  using Error::Error;
};

class AmbiguousAlignment : public Error {
public:
  using Error::Error;
};

class UndefinedRatio : public Error {
public:
  using Error::Error;
};

/// Thrown when the eigensolver hits its sweep cap. Carries the residuals of
/// the last Ritz pairs so callers can decide whether they are usable.
class ConvergenceFailure : public Error {
public:
  ConvergenceFailure(const std::string& what, std::vector<double> residuals)
      : Error(what), best_residuals_(std::move(residuals)) {}

  const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

private:
  std::vector<double> best_residuals_;
};

} // namespace steklov
