#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cocreate {

// Base for every error the engine raises deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class EmptyArmSet : public Error {
 public:
  EmptyArmSet() : Error("bandit has no arms") {}
};

class UnknownField : public Error {
 public:
  using Error::Error;
};

class StaleSnapshot : public Error {
 public:
  using Error::Error;
};

class NoDelimitedSpan : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class BackendTimeout : public BackendError {
 public:
  using BackendError::BackendError;
};

class WrongPhase : public Error {
 public:
  WrongPhase(std::string operation, std::string phase)
      : Error(operation + " is not allowed in phase " + phase),
        operation_(std::move(operation)),
        phase_(std::move(phase)) {}

  const std::string& operation() const noexcept { return operation_; }
  const std::string& phase() const noexcept { return phase_; }

 private:
  std::string operation_;
  std::string phase_;
};

class MissingPendingOutcome : public Error {
 public:
  MissingPendingOutcome() : Error("no pending agent outcome to give feedback on") {}
};

// Raised by log replay; carries the first offending sequence number.
class LogCorruption : public Error {
 public:
  LogCorruption(std::string message, std::uint64_t seq, std::size_t line)
      : Error(std::move(message)), seq_(seq), line_(line) {}

  std::uint64_t seq() const noexcept { return seq_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::uint64_t seq_;
  std::size_t line_;
};

}  // namespace cocreate
