#pragma once

#include <stdexcept>
#include <string>

namespace trimer {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite amplitudes handed to an operation that requires a finite state.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Parameters that cannot be evaluated (wrong channel, schedule undefined at t, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside the mathematical domain of a closed form (negative ratios, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedSizeError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// The integrated state became non-finite; carries the last time with a finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double last_good_time)
      : Error(what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

class StepUnderflowError : public Error {
 public:
  StepUnderflowError(const std::string& what, double last_good_time)
      : Error(what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

/// A scenario document violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace trimer
