#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contact {

/// Base class of every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument: dimension mismatch, non-finite input, invalid configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// |1 - h D4 L| or |1 + h D3 L| fell below the singularity threshold.
class SingularUpdate : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class StepTooLarge : public Error {
 public:
  using Error::Error;
};

/// The requested operation is only defined for a narrower class of systems.
class UnsupportedSystem : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class MismatchedTrajectories : public Error {
 public:
  using Error::Error;
};

/// File could not be opened or written; the message names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Wraps a stepper failure with the index of the step that failed.
class StepFailure : public Error {
 public:
  StepFailure(std::size_t step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

  [[nodiscard]] std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace contact
