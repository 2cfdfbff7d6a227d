#pragma once

#include <stdexcept>
#include <string>

namespace relosc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a family, scale function or interval.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed family parameters (non-positive limits, bad tables).
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Query outside the recorded range of a trace.
class RangeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Operation needs declared tail limits (p_inf, q_inf, r_inf).
class MissingTail : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class PositivityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The step-size controller fell below the minimum step.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double last_good_x)
      : Error(what), last_good_x_(last_good_x) {}
  double last_good_x() const noexcept { return last_good_x_; }

 private:
  double last_good_x_;
};

}  // namespace relosc
