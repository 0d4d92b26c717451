#pragma once

#include <stdexcept>
#include <string>

namespace fbp {

/// Process exit codes shared by the library and the CLI.
enum class ExitCode : int {
  success = 0,
  verification_failure = 1,
  configuration_error = 2,
  numerical_instability = 3,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual ExitCode exit_code() const noexcept = 0;
};

/// Argument outside the domain of a map (branch inverse, flux, grid range).
class DomainError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::configuration_error; }
};

/// Final datum with nonzero slope at x = 0 or x = L.
class BoundaryError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Branch gap has collapsed (v has reached the critical value A).
class NearSingularError : public DomainError {
 public:
  using DomainError::DomainError;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::numerical_instability; }
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::configuration_error; }
};

class PreconditionError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::configuration_error; }
};

/// Exponential growth beyond what a double can carry.
class InstabilityError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::numerical_instability; }
};

}  // namespace fbp
