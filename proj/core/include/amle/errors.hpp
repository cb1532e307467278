#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace amle {

/// Malformed or out-of-contract input (bad arguments, domain violations,
/// unparseable files). The CLI maps these to exit status 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file that does not follow the expected format; carries the 1-based line.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Numerical breakdown on otherwise valid input. The CLI maps these to exit
/// status 2, and the coverage experiment counts them as failed replicates.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// S(x) is not positive definite at some state (ellipticity violated there).
class SingularDiffusionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotPsdError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The drift parameters cannot be identified from the path (flat likelihood
/// in some direction).
class NonIdentifiedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SimulationDivergedError : public NumericalError {
 public:
  SimulationDivergedError(const std::string& what, std::size_t step)
      : NumericalError(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace amle
