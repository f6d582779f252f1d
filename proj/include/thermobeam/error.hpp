#pragma once

#include <stdexcept>
#include <string>

namespace thermobeam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// A kernel hypothesis (H1, H2 or H3) does not hold for the model.
class HypothesisError : public Error {
 public:
  HypothesisError(std::string hypothesis, const std::string& what)
      : Error(hypothesis + ": " + what), hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

class DegenerateDivisor : public Error {
 public:
  using Error::Error;
};

/// Heat law requested is incompatible with the parameters or the state.
class LawMismatch : public Error {
 public:
  using Error::Error;
};

/// State layout (q component, number of memory modes) does not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(double xi, double t, const std::string& what)
      : Error(what + " (xi=" + std::to_string(xi) + ", t=" + std::to_string(t) + ")"), xi_(xi), t_(t) {}
  double xi() const noexcept { return xi_; }
  double t() const noexcept { return t_; }

 private:
  double xi_;
  double t_;
};

/// A stored state breaks one of the FrequencyState invariants.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class CflViolation : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class RegimeMismatch : public Error {
 public:
  using Error::Error;
};

class CalibrationFailure : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace thermobeam
